"""
Driving the command line
========================

The ``curvlab`` command wraps every capability and returns exit code 0, 1
or 2 for pass, violation and usage error.
"""

import json

from curvlab.cli import main

# Catalog report as text.
main(["model", "--name", "s3xs1", "--report", "hypotheses", "--format", "text"])

# Finite-difference check with a user supplied conformal factor.
w = json.dumps({"family": "sine", "amplitude": 0.05, "axis": 0})
code = main(["verify", "--preset", "s2xs2", "--check", "sigma2-divergence", "--w", w, "--format", "csv"])
print("exit code:", code)

# A quick certificate restricted to B = 0.
code = main(["certify", "--samples", "20000", "--starts", "20", "--slice", "b0", "--format", "text"])
print("exit code:", code)
