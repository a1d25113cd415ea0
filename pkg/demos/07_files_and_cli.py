"""Matrix files and the colinv command line.

Run: python demos/07_files_and_cli.py
"""
import io
import tempfile
from pathlib import Path

import numpy as np

from colinv import read_matrix, write_matrix
from colinv.cli import main

tmp = Path(tempfile.mkdtemp())
rng = np.random.default_rng(7)
write_matrix(tmp / "a.csv", rng.standard_normal((6, 6)) + 3 * np.eye(6))
# .bin files use the binary format, everything else CSV
write_matrix(tmp / "tall.bin", rng.standard_normal((9, 4)))

# same as: colinv invert a.csv --solver cg --eps 1e-10 --out inv.csv
main(["invert", str(tmp / "a.csv"), "--solver", "cg", "--eps", "1e-10", "--out", str(tmp / "inv.csv")])
print("A @ inv close to I:", np.allclose(read_matrix(tmp / "a.csv") @ read_matrix(tmp / "inv.csv"), np.eye(6)))

main(["pinv", str(tmp / "tall.bin"), "--eps", "1e-9", "--out", str(tmp / "pinv.csv")])
print("pinv shape:", read_matrix(tmp / "pinv.csv").shape)

# a small bound check; exit code 0 means no violations
out = io.StringIO()
code = main(["check-bounds", "--family", "spd", "--eps", "1e-2,1e-4", "--trials", "2", "--n", "8",
             "--out", str(tmp / "bounds.csv")], out=out)
print("check-bounds exit code", code)
print((tmp / "bounds.csv").read_text().splitlines()[0])

# bad input gives exit code 1 and a message
code = main(["invert", str(tmp / "missing.csv")], out=io.StringIO())
print("missing file exit code", code)
