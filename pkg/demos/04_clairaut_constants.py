"""Do the weights of a branching tree pin down its Clairaut constants?

On a general surface of revolution they do not: the constants depend on
the tree's orientation, as the rotation experiment shows.  The closed
forms predict them from the weights plus one launch angle (with a sign
subtlety in the published first ratio), and on the sphere the sine
constants are probed against the weight fractions.
"""

import math

from geofermat import (SurfacePoint, branch_report, law_of_sines_diameter,
                       make_surface, predict_clairaut_constants,
                       rotate_tree_experiment, sector_angles_from_weights,
                       shoot)


def main():
    print("Closed-form prediction from weights + one branch angle:")
    pc = predict_clairaut_constants((1.0, 1.0, 1.0), math.radians(100), 1.0)
    print(f"equal weights, alpha1 = 100 deg: alpha2 = "
          f"{math.degrees(pc.alpha2):.1f} deg, alpha3 = "
          f"{math.degrees(pc.alpha3):.1f} deg")
    print(f"first ratio roots {pc.c2_roots}, angular relations pick "
          f"'{pc.c2_root}' (published sign agrees: {pc.printed_sign_ok_c2})")
    print(f"second ratio roots {pc.c3_roots}, angular relations pick "
          f"'{pc.c3_root}' (published sign agrees: {pc.printed_sign_ok_c3})")

    print("\nLaw of sines on the weight triangle:")
    check = law_of_sines_diameter((1.0, 1.0, 1.0))
    print(f"equal weights: per-branch b/sin = "
          f"{[round(x, 9) for x in check.per_branch]}, corrected "
          f"circumdiameter {check.d_corrected:.9f}, published form gives "
          f"{check.d_printed:.9f} (agree: {check.printed_matches})")

    print("\nRotation experiment on the paraboloid:")
    paraboloid = make_surface("paraboloid", a=1.0)
    center = SurfacePoint(1.0, 0.2)
    exp = rotate_tree_experiment(
        paraboloid, center, (2.0, 3.0, 4.0), (0.3, 0.4, 0.5), 1.9,
        [math.radians(d) for d in (0, 15, 30)])
    print(f"recovered weight spread across rotations: "
          f"{exp.weight_spread:.2e} (the weights are rotation-invariant)")
    print(f"per-branch constant spread: "
          f"{[round(s, 4) for s in exp.clairaut_spread]} "
          f"(the constants are not)")

    print("\nSphere probe of c_i / sum(c) against b_i / sum(b):")
    sphere = make_surface("sphere", radius=1.0)
    center = SurfacePoint(1.2, 0.3)
    b = (2.0, 3.0, 4.0)
    phi = sector_angles_from_weights(b)
    headings = (2.0, 2.0 + phi[0], 2.0 + phi[0] + phi[1])
    paths = [shoot(sphere, center, th, L)
             for th, L in zip(headings, (0.3, 0.4, 0.5))]
    rep = branch_report(sphere, center, paths, b)
    if rep.sphere_probe is not None:
        print(f"ratios     {[round(r, 6) for r in rep.sphere_probe.ratios]}")
        print(f"fractions  "
              f"{[round(f, 6) for f in rep.sphere_probe.weight_fractions]}")
        print(f"deviations {[f'{d:.3e}' for d in rep.sphere_probe.deviations]}"
              f" (positivity hypothesis holds: "
              f"{rep.sphere_probe.all_positive})")
    else:
        print(f"probe undefined: {rep.sphere_note}")

    # choosing headings with sin(beta_i) proportional to b_i makes the
    # ratios exact by construction
    thetas = [math.acos(0.2 * bi) for bi in b]
    thetas[1] = -thetas[1]
    paths = [shoot(sphere, center, th, 0.3) for th in thetas]
    rep = branch_report(sphere, center, paths, b)
    print(f"proportional construction deviations: "
          f"{[f'{d:.1e}' for d in rep.sphere_probe.deviations]}")


if __name__ == "__main__":
    main()
