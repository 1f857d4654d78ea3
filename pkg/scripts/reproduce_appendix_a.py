#!/usr/bin/env python3
"""
Show forward stepwise going wrong on the three-feature instance
"""
import os
import sys

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.schemas.objective import ObjectiveKind, ObjectiveSpec
from app.schemas.trace import Algorithm
from app.services.datagen import appendix_a_instance
from app.services.evaluation import brute_force_best_subset, r_squared
from app.services.selection_service import SelectionService
from app.services.solver_service import RestrictedSolver

LS = ObjectiveSpec(kind=ObjectiveKind.LEAST_SQUARES)


def reproduce(z):
    data = appendix_a_instance(z)
    solver = RestrictedSolver(LS, data)
    selector = SelectionService(solver, threads=1)

    print(f"z = {z}")
    support, value = brute_force_best_subset(solver, 2, threads=1)
    print(f"  best pair {support}: R^2 = {r_squared(value, data):.9f}")

    for algorithm, k in [(Algorithm.FORWARD_STEPWISE, 2), (Algorithm.OMP, 2), (Algorithm.FOBA, 3)]:
        trace = selector.run(algorithm, k)
        order = ", ".join(str(j) for j in trace.selection_order())
        print(f"  {algorithm.value} k={k}: {{{order}}} R^2 = {r_squared(trace.final_f_value, data):.9f}")


if __name__ == "__main__":
    for z in (0.05, 0.1, 0.2):
        reproduce(z)
