"""

Store Flow for each command.

Input is Context.
Every step reads its arguments from the context by name and returns a dict
that is written back onto the context for the next step.

"""
FLOW = {

'gen-graph': [
    'generate_instance',            # seeded 3-regular or Erdos-Renyi graph
    'write_instance_file',          # "n m" header + "u v w" lines
],

'solve': [
    'load_instance',                # local file, remote library, or generated
    'reference_optimum',            # brute force (n <= 30) or --known-optimum
    'solve_trials',                 # interleaved parity sectors, early stop on success
    'write_solve_artifacts',        # trace.csv + summary.json
],

'success-table': [
    'build_instance_jobs',          # instances per size with their reference energies
    'run_instance_jobs',            # worker pool
    'tabulate_success',             # per-n success rate
    'write_success_table',
],

'bench': [
    'time_sizes',                   # value + gradient wall time per n
    'fit_slope',                    # log-log exponent
    'write_bench_table',
],

'verify': [
    'run_checks',                   # oracle, gradient, basis-state weights, reachability bound, conservation
    'write_verification_report',
],
}
