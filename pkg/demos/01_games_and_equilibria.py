"""Games on the simplex and their interior equilibria.

A zero-sum symmetric game is an antisymmetric payoff matrix; its interior
Nash equilibria are exactly the interior null vectors of that matrix, so
finding them is a linear-algebra problem.
"""

import numpy as np

from gamekinetics import (cyclic_matrix, interior_nash, is_nash, payoff, rps_matrix,
                          two_strategy_matrix)

# The classic Rock-Paper-Scissors matrix: each strategy beats the next.
rps = rps_matrix(1, 1)
print("rock-paper-scissors payoff matrix:")
print(rps.a)

# Expected payoff of mixed strategies.  Paper against Rock earns the win
# weight; any strategy against itself earns nothing (zero-sum symmetry).
print("\npaper vs rock:", payoff([0, 1, 0], [1, 0, 0], rps))
print("self play:", payoff([0.2, 0.5, 0.3], [0.2, 0.5, 0.3], rps))

# Cyclic games generalize RPS to any odd number of strategies.
for d in (3, 5, 7):
    game = cyclic_matrix(d)
    result = interior_nash(game)
    print(f"\ncyclic d={d}: interior equilibrium {np.round(result.point, 4)}"
          f" (null dim {result.null_dim})")
    assert is_nash(result.point, game)

# Two-strategy games with b != 0 have no interior equilibrium at all:
# one strategy strictly dominates.
dominant = two_strategy_matrix(0.8)
print("\ntwo-strategy game equilibrium:", interior_nash(dominant).point)
