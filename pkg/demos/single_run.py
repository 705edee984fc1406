"""Walk through one identification episode step by step.

Runs a single game on the d=5 uniform matroid benchmark, dumps the trace to
stdout every 200 rounds, and prints the final recommendation.
"""

import numpy as np

from combexplore.engine import GameConfig, run_combgame
from combexplore.scenarios import make_scenario


def main():
    scenario = make_scenario("uniform_matroid:d=5,k=3,sigma=0.1")
    print(f"scenario: {scenario.name}")
    print(f"true means: {scenario.instance.means}")
    print(f"best answer: {scenario.expected_best}")
    print()

    config = GameConfig(
        learner_kind="lloo",
        tracking="c_track",
        threshold_mode="stylized",
        delta=0.1,
        record_trace=True,
    )
    result = run_combgame(
        config,
        scenario.instance,
        scenario.action_space,
        scenario.answer_space,
        np.random.default_rng(0),
    )

    print(f"{'round':>7} {'action':>10} {'statistic':>10} {'beta':>8} {'candidate':>10} {'support':>8}")
    for t, action, stat, beta, candidate, support in result.trace:
        if t % 200 == 0 or t == result.trace[-1][0]:
            print(f"{t:>7} {str(action):>10} {stat:>10.3f} {beta:>8.3f} {str(candidate):>10} {support:>8}")

    print()
    print(f"stopped after {result.stopping_time} rounds")
    print(f"recommended {result.recommended} (correct: {result.correct})")
    print(f"rounds with a wrong candidate answer: {result.rounds_with_wrong_candidate}")


if __name__ == "__main__":
    main()
