"""Inverse-polynomial degree versus condition number for both inversion routes.

    python3 scripts/degree_study.py --kappas 2 4 8 16 --eps 1e-3
"""

import argparse

from qconv.spectral import Route, fit_loglog_slope, inverse_poly_degree


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kappas", type=float, nargs="+", default=[2, 4, 8, 16])
    parser.add_argument("--eps", type=float, default=1e-3)
    args = parser.parse_args(argv)

    print("route,kappa,kappa_eff,degree,sup_error")
    degrees = {}
    for route in Route:
        degrees[route] = []
        for k in args.kappas:
            p = inverse_poly_degree(k, args.eps, route)
            degrees[route].append(p.degree)
            print(f"{route.value},{k:g},{p.kappa_eff:g},{p.degree},{p.achieved_sup_error:.3e}")
    for route, ds in degrees.items():
        print(f"# {route.value}: log-log slope {fit_loglog_slope(args.kappas, ds):.3f}")


if __name__ == "__main__":
    main()
