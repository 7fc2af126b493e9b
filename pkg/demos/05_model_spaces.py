"""
Model spaces and global identities
==================================

Gauss-Bonnet closure, the Weyl energy threshold and the symmetric-space
identities on the catalog.
"""

from curvlab.models import (
    MODEL_NAMES,
    gauss_bonnet_check,
    get_model,
    symmetric_identity_suite,
    theorem_hypothesis_check,
    weitzenbock_constants,
)

print(f"{'model':7} {'chi':>3} {'GB residual':>12} {'int |W|^2':>10} {'16 pi^2 chi':>11}  tag")
for name in MODEL_NAMES:
    m = get_model(name)
    gb = gauss_bonnet_check(m)
    hyp = theorem_hypothesis_check(m)
    print(
        f"{name:7} {m.euler_char:3d} {gb.residual:12.2e} {hyp.weyl_integral:10.3f} "
        f"{hyp.threshold:11.3f}  {hyp.tag.value}"
    )

print("CP^2 constants:", weitzenbock_constants(get_model("cp2")))
for name, value in symmetric_identity_suite(get_model("cp2")).items():
    print(f"  {name:22} {value}")
