"""Finite-horizon multi-player reach-avoid Markov game solver.

Players on a shared finite state space each steer toward a target set while
avoiding one another; the solver computes pure Nash equilibrium local-feedback
policies by iterative best response on occupancy-projected joint values, and
ships brute-force oracles to certify the results on small instances.
"""

from ._kernels import backend_name
from .bestresponse import BestResponseResult, best_response, greedy_action, stochastic_obstacle_term
from .errors import (
    ConfigurationError,
    DegenerateScenarioError,
    ReachGameError,
    SizeGuardError,
    ValidationError,
)
from .game import (
    GameSpec,
    PlayerMdp,
    Policy,
    avoid_indicator,
    joint_reach_avoid,
    policy_kernel,
    policy_kernels,
    reach_indicator,
    trajectory_probability,
    validate_game,
)
from .gridworld import GridSpec, build_grid_mdp, random_scenario
from .ibr import IbrConfig, IbrTrace, default_initial_policies, run_ibr, shortest_path_policy
from .jointvalue import JointValue, backward_step, potential_value, terminal_value
from .metrics import (
    MetricsRecord,
    collision_likelihood_exact,
    collision_likelihood_mc,
    compute_metrics,
    reach_reduction_exact,
    reach_reduction_mc,
    simulate_trajectories,
)
from .occupancy import (
    EpsilonSchedule,
    OccupancyTable,
    TwoStepOpponentOccupancy,
    epsilon_at,
    forward_propagate,
    opponent_occupancy,
    two_step_occupancy,
)
from .oracle import GlobalPolicy, NashReport, enumerate_F, enumerate_tail_value, global_dp, verify_nash

__version__ = "0.1.0"
