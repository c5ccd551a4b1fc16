from plot_fixtures import scan_csv, square_scaling_csv  # noqa: F401
