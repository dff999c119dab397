"""Compare the four exploration strategies on the erp-like preset.

Prints mean action-class counts, the one-tailed Wilcoxon p-values against RLS
and the share of the synthetic test plan each strategy satisfies. Takes about a
minute with the default 5 seeds x 50 episodes; pass ``--quick`` for a smaller run.
"""
import argparse

from guitestgen.harness import ExperimentConfig, run_experiment, stats_table, wilcoxon_table
from guitestgen.testplan import coverage_table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="2 seeds x 10 episodes")
    args = parser.parse_args()
    cfg = ExperimentConfig(repetitions=2, episodes=10) if args.quick else ExperimentConfig()

    res = run_experiment(cfg)
    print("Action classes (mean, standard deviation)")
    print(stats_table(res))
    print("Wilcoxon p-values, alternative: RLS < strategy")
    print(wilcoxon_table(res))
    print("Test plan coverage over all repetitions")
    print(coverage_table(res.coverage))
    for strategy, auto in res.automata.items():
        top = sorted(auto.edges.items(), key=lambda kv: -kv[1])[:3]
        flows = ", ".join(f"{a.value}->{b.value} {w}" for (a, b), w in top)
        print(f"{strategy}: busiest transitions {flows}")


if __name__ == "__main__":
    main()
