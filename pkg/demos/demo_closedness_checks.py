"""Walk through the closedness rules on a gallery of support patterns.

Run from the repository root:  python demos/demo_closedness_checks.py
"""

from sparse_closure import (
    check_theorem5_conditions,
    closedness_verdict,
    dense_pattern,
    lu_pattern,
    validate_pattern,
)

print("=" * 72)
print("1. A dense two-layer pattern (input 5, hidden 4, output 3)")
print("=" * 72)
pattern = dense_pattern((5, 4, 3))
verdict = closedness_verdict(pattern)
print(f"verdict: {verdict.status.value} (rule: {verdict.rule})")
print("every product of a 3x4 and a 4x5 matrix has rank at most 3, and")
print("bounded-rank matrix sets are closed, so training always has a minimizer.\n")

print("=" * 72)
print("2. A scalar-output pattern with arbitrary sparsity")
print("=" * 72)
pattern = validate_pattern(
    {
        "dims": [10, 5, 1],
        "masks": [
            [[1, 1], [1, 4], [2, 2], [3, 7], [5, 10]],
            [[1, 1], [1, 3], [1, 5]],
        ],
    }
)
verdict = closedness_verdict(pattern)
print(f"verdict: {verdict.status.value} (rule: {verdict.rule})")
print("with one output, the realizable linear maps form a coordinate subspace")
print("(the union of first-layer row supports over connected neurons).\n")

print("=" * 72)
print("3. The lower-upper triangular pattern: the canonical failure")
print("=" * 72)
for d in (2, 3, 4):
    verdict = closedness_verdict(lu_pattern(d))
    print(f"d={d}: {verdict.status.value} (rule: {verdict.rule})")
witness = closedness_verdict(lu_pattern(2)).witness
print("witness (d=2):", [[str(x) for x in row] for row in witness])
print("the anti-diagonal identity can be approximated by lower*upper products")
print("to any precision, but never equals one: the factorization set is not")
print("closed, so a training problem targeting it has no optimal parameters.\n")

print("=" * 72)
print("4. The two-part sufficient condition for shallow patterns")
print("=" * 72)
pattern = dense_pattern((4, 3, 2))
report = check_theorem5_conditions(pattern)
print(f"full output mask: {report.condition1_full_output_mask}")
print(f"all {len(report.subset_verdicts)} hidden-subset factorization sets closed: "
      f"{all(sv.status.value == 'closed' for sv in report.subset_verdicts)}")
print(f"sufficient condition holds: {report.holds}")

pattern = lu_pattern(2)
report = check_theorem5_conditions(pattern)
print(f"\nfor the triangular pattern: full output mask = "
      f"{report.condition1_full_output_mask}, holds = {report.holds}")
for sv in report.subset_verdicts:
    print(f"  hidden subset {tuple(i + 1 for i in sv.hidden)}: {sv.status.value}")
