"""Global detector against LAII and finite-difference curvature extrema.

Runs the comparison through the command-line front end and prints the
summary table; CSV files land in the output directory.

    python3 demos/compare_methods.py [out_dir]
"""

import sys

from globvert.cli import main

out_dir = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
for shape in ("rounded_rect:w=2,h=1,r=0.1", "star:base=1,a=0.3,k=5"):
    print(f"== {shape}")
    main(["compare", shape, "--samples", "100", "--scenarios", "1", "--out", f"{out_dir}/{shape.split(':')[0]}"])
