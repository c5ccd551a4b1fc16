from graph_fixtures import c4, c6, k4, p3, p4, s5  # noqa: F401
