"""Global EDF analysis and exact simulation for sporadic DAG task systems."""

from dagedf.taskmodel import (CycleError, DagTask, TaskSystem, Vertex,
                              longest_chain_length, make_task,
                              topological_order, trivial_feasibility,
                              validate_task_system, volume)
from dagedf.workfunction import (LIMIT, PiecewiseProfile, approx_work,
                                 approx_work_profile, exact_work, lambda_hat,
                                 start_offsets, system_work_profile,
                                 work_lower_bound, work_upper_bound)
from dagedf.schedtests import analyze, pseudopoly_test, sufficient_test
from dagedf.simulator import (JobCollection, JobInstance, edf_simulate,
                              extract_witness, interval_work, sinfty_schedule,
                              validate_normal)
from dagedf.generators import dense_pattern, random_sporadic, synchronous_sequence

__version__ = "0.1.0"
