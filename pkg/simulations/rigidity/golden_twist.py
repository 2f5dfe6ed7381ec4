from clslvr import *

# Hoelder and non-Brjuno tables for the perturbed twist with golden rotation
# number, and the super-Liouville counterpart for a Liouville truncation :
out_dir = './results/rigidity/'

f    = PerturbedTwist(GOLDEN, 0.05)
gate = pseudo_rotation_gate(f)
print_params('pseudo-rotation gate', gate, cls=f)

est  = rotation_number(f, f.domain.halton(16, 0.9), 10**4)
est2 = rotation_number(f, f.domain.halton(16, 0.9), 2*10**4)
print_text("::: rotation number %.6f at n, %.6f at 2n :::"
           % (est.value, est2.value), cls=f)

hol = holder_rigidity_check(f, 'surd:1,-1,5,2', 1.0, 1.0, range(4, 20),
                            grid=16, max_iterations=10**4, gate=gate)
write_csv(hol.rows(), ['j', 'q', 'q_next', 'measured', 'log_measured',
                       'log_bound', 'holds', 'skipped', 'reason'],
          out_dir + 'holder_golden.csv')

nb  = nonbrjuno_rigidity_check(f, 'liouville:3', 2, 4, depth=3, grid=16,
                               gate=gate)
write_json(nb.summary(), out_dir + 'nonbrjuno_liouville.json')
