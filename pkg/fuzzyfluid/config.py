import numpy as np

# # ------- group and chart -------

# 1 + u0 below this means the element sits at the antipode g = -1,
#   i.e. the chart momentum is at infinity
ANTIPODE_TOL = 1e-12

SINGULAR_FRAME_TOL = 1e-12

# fractional lattice coordinates closer than this to an integer are snapped,
#   so on-node deposition is an exact Kronecker delta
LATTICE_SNAP_TOL = 1e-9

# ordered pairs composed per block when the star product is evaluated
#   on the supports of its factors
STAR_PAIR_BLOCK = 1 << 16

TWO_PI = 2.0 * np.pi
TWO_PI_SQ = TWO_PI ** 2

# # ------- pairing -------

pairing_polarized_trace = 'polarized_trace'
pairing_chart_dot = 'chart_dot'
pairing_choices = (pairing_polarized_trace, pairing_chart_dot)
default_pairing = pairing_polarized_trace

# dimension of the factor q(g) with B(g1, g2) = q(g1) . q(g2)
pairing_factor_dim = {pairing_polarized_trace: 4,
                      pairing_chart_dot      : 3}

# # ------- integration -------

integrator_choices = ('rk4', )
default_integrator = 'rk4'

default_dt = 1e-3
default_t_end = 0.5
default_snapshot_every = 100

# # ------- initial conditions -------

initial_types = ('random', 'modes', 'snapshot')
default_seed = 42
default_k0 = 1.5
default_amplitude = 0.1

# # ------- tolerances -------

# keys are the names accepted in the "tolerances" block of a config
default_tolerances = {'reality'         : 1e-10,
                      'energy_drift'    : 1e-8,
                      'equivalence'     : 1e-12,
                      'gradient'        : 1e-6,
                      'brute_force'     : 1e-10,
                      'closed_form'     : 1e-12,
                      'group_axioms'    : 1e-14,
                      'roundtrip'       : 1e-12,
                      'spectrum_sum'    : 1e-10,
                      'aliasing_warning': 1e-3, }

# relative step of central differences used in gradient checks
fd_rel_step = 1e-6

# # ------- configuration schema -------

required_config_keys = ('a', 'h', 'kmax', 'dt', 't_end', 'pairing', 'initial')
optional_config_keys = ('integrator', 'snapshot_every', 'output', 'tolerances')
initial_keys = {'random'  : ('type', 'seed', 'k0', 'amplitude', 'kcut'),
                'modes'   : ('type', 'modes'),
                'snapshot': ('type', 'path')}
mode_entry_keys = ('k', 'lambda', 'mu')
output_keys = ('out_dir', 'diagnostics_file', 'snapshot_prefix')

# # ------- outputs -------

output_dir_default = 'fuzzyfluid_results'
diagnostics_file_name = 'diagnostics.csv'
resolved_config_file_name = 'config_resolved.json'
snapshot_prefix = 'snapshot'
final_snapshot_name = 'final'
sweep_file_name = 'limit_sweep.csv'
spectrum_suffix = '_spectrum.csv'

diagnostics_columns = ('t', 'H', 'L2_lambda', 'L2_mu', 'reality_residual',
                       'aliasing_loss', 'helicity_scalar', 'helicity_x',
                       'helicity_y', 'helicity_z')
sweep_columns = ('a', 'D', 'empirical_order')
spectrum_columns = ('shell', 'k_center', 'energy')

DELIMITER = ','
EXPORT_FORMAT = '%.17g'
JSON_INDENT = 1

# # ------- CLI -------

default_sweep_a_list = (0.2, 0.1, 0.05)

EXIT_SUCCESS = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NON_FINITE = 3

DEFAULT_NUM_PROCS = 1

# fixed seed for the embedded verification suite
SEED_RANDOM = 652
