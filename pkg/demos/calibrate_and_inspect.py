"""Run the one-time scale calibration and unpack what it found.

Two scalars are fitted at the reference point: the coupling scale
against V(a1, b1) = 2 at zero frequency, and the coherence readout
scale against V(a1, S) = 1 there.  The artifact records for each target
whether it was actually reached; the second one is not reachable in
this model (the fitted value sits at the vertex of an exactly quadratic
curve that never gets anywhere near 1), and the artifact says so
instead of hiding it.  See VALIDATION.md for the full account.
"""

import json

from eitfwm import cli
from eitfwm.params import reference_params


def main():
    art = cli.calibrate(cli.RunConfig(params=reference_params()))

    print("fitted scales:")
    print(f"  coupling_scale  = {art['coupling_scale']:.12g}")
    print(f"  spinwave_scale  = {art['spinwave_scale']:.12g}")
    print("targets versus achieved:")
    for key, target in art["targets"].items():
        got = art["achieved"][key]
        met = "met" if art["target_met"][key] else "NOT met"
        print(f"  {key}: target {target}, achieved {got:.6g}  [{met}]")
    print("witness signs at the evaluation point:")
    for key, signs in art["signs"].items():
        print(f"  {key}: {tuple(signs)}")
    fit = art["spinwave_fit"]
    print("readout-scale fit branches:")
    print(f"  primary  (a1, S): vertex at scale "
          f"{fit['primary']['scale']:.6g}, V = {fit['primary']['value']:.6g}")
    print(f"  alternate (S, b1): vertex at scale "
          f"{fit['alternate']['scale']:.6g}, "
          f"V = {fit['alternate']['value']:.6g}")
    print()
    print(json.dumps(art, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
