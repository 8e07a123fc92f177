import sys
from mpcpart.experiment import cores_spec, run_sweep


# Corner cells of the minimum core table: light load with short sections,
# and heavy load with long ones.
CELLS = ((1.0, 0.08), (8.0, 0.16))


if __name__ == "__main__":
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 100
    for load, ratio in CELLS:
        result = run_sweep(cores_spec([load], [ratio], trials=trials, seed=0))
        for row in result.summary:
            if row['metric'] in ('mean_cores', 'reduction_pct'):
                print("S=%-4s C=%-5s %-6s %-14s %s" % (load, ratio, row['algorithm'], row['metric'], row['value']))
