"""A small randomized decomposition campaign.

Set SLICE_LAB_THREADS to cap the worker processes.
"""
from slice_lab.campaign import Ranges, run_campaign

if __name__ == "__main__":
    res = run_campaign(instances=200, seed=0, ys_per_instance=5, ranges=Ranges())
    print("checks", res["checks"], "pass rate", res["pass_rate"])
    print("instances with a circle coordinate:", res["circle_instances"])
    for key, value in res["worst"].items():
        print(f"  {key}: {value}")

    # tampering with the output must show up as failures
    bad = run_campaign(instances=5, seed=100, ys_per_instance=2, tamper=True)
    print("tampered pass rate", bad["pass_rate"], "first failure", bad["failures"][0])
