import pytest


def write_scan_csv(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# version=test\n")
        fh.write("protocol,gamma,theta,replica,seed\n")
        for protocol, gamma, theta in rows:
            fh.write(f"{protocol},{gamma!r},{theta!r},0,1\n")
    return str(path)


def write_scaling_csv(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# version=test\n")
        fh.write("N,protocol,replica,B,gamma_c_paper,gamma_c_exact,seed\n")
        for n, protocol, b in rows:
            fh.write(f"{n},{protocol},0,{b!r},0.1,0.05,1\n")
    return str(path)


@pytest.fixture
def scan_csv(tmp_path):
    rows = []
    for i in range(10):
        gamma = 0.05 * i
        rows.append(("SP", gamma, max(0.0, 0.4 * (gamma - 0.1))))
        rows.append(("HA", gamma, max(0.0, 0.4 * (gamma - 0.2))))
    return write_scan_csv(tmp_path / "scan.csv", rows)


@pytest.fixture
def square_scaling_csv(tmp_path):
    rows = [(n, "SP", float(n) ** 2) for n in (10, 100, 1000)]
    rows += [(n, "HA", float(n) ** 1.5) for n in (10, 100, 1000)]
    return write_scaling_csv(tmp_path / "scaling.csv", rows)
