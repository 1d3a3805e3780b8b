#!/usr/bin/env python3
"""Solve an LP file with HiGHS and write `name value` lines.

usage: highs_solve.py MODEL.lp OUT.sol [TIME_LIMIT] [MIP_GAP]
"""
import sys

import highspy


def main(argv):
    if len(argv) < 3:
        sys.stderr.write(__doc__)
        return 1
    lp, sol = argv[1], argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("random_seed", 0)
    if len(argv) > 3:
        h.setOptionValue("time_limit", float(argv[3]))
    if len(argv) > 4:
        h.setOptionValue("mip_rel_gap", float(argv[4]))
    if h.readModel(lp) != highspy.HighsStatus.kOk:
        sys.stderr.write(f"cannot read {lp}\n")
        return 1
    h.run()
    status = h.getModelStatus()
    ms = highspy.HighsModelStatus
    info = h.getInfo()
    has_sol = info.primal_solution_status == 2
    if status == ms.kOptimal:
        tag = "optimal"
    elif status in (ms.kInfeasible, ms.kUnboundedOrInfeasible):
        tag = "infeasible"
    elif has_sol:
        tag = "feasible"
    else:
        tag = "timeout"
    with open(sol, "w") as out:
        out.write(f"# status: {tag}\n")
        if has_sol:
            out.write(f"# gap: {info.mip_gap:.10g}\n")
            values = h.getSolution().col_value
            lp_ = h.getLp()
            for name, v in zip(lp_.col_names_, values):
                if abs(v - round(v)) < 1e-6:
                    v = round(v)
                out.write(f"{name} {v:.10g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
