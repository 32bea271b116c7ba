"""Run the existence certificate for a = 1.78 on c in [0.0495, 0.0505] and re-check it.

    python3 demos/certify_run.py [out.json]
"""
import sys
import time

from bryant import certify_existence, check_certificate


def main(out=None):
    t0 = time.perf_counter()
    cert = certify_existence(1.78, 0.0495, 0.0505, n=4000, subintervals=50)
    elapsed = time.perf_counter() - t0
    b = cert.budget
    print(f"verdict          {cert.verdict} {cert.reason}".rstrip())
    print(f"runtime          {elapsed:.1f} s")
    print(f"bounds ({cert.bounds_source})  M={b.bounds.M:.4g} M1={b.bounds.M1:.4g} "
          f"M2={b.bounds.M2:.4g} M3={b.bounds.M3:.4g}")
    print(f"epsilon          {b.epsilon:.3e}")
    print(f"epsilon_hat      {b.epsilon_hat:.3e}")
    for label, e in cert.endpoint_enclosures.items():
        print(f"{label} = {e['c']}: f1 in {e['f1']}, f2 in {e['f2']} ({e['expect']})")
    low = min(min(r.f1[0], r.f2[0]) for r in cert.sweep if r.f1 and r.f2)
    print(f"min lower bound of f1, f2 over the sweep: {low:.4f}")
    problems = check_certificate(cert)
    print("independent re-check:", "ok" if not problems else problems)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(cert.to_json() + "\n")
        print("wrote", out)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
