from clslvr import *
import numpy as np
import math

# displacement, free-disc and Kac bounds for small rigid rotations :
trials  = 10**5
out_dir = './results/rigidity/'

rows = []
for eps in [0.01, 0.02, 0.05]:
	f    = RigidRotation(eps)
	gate = pseudo_rotation_gate(f)

	disp = displacement_bound(f, eps, 24, gate=gate)
	disc = free_disc_search(f, eps, trials, 100, rng_seed=1, gate=gate)

	# the largest free disc of a rotation by 2 pi eps has radius
	# sin(pi eps) / (1 + sin(pi eps)) :
	s     = math.sin(math.pi*eps)
	exact = (s / (1 + s))**2

	c    = disc['center']
	kac  = kac_return_stats(f, (c, disc['radius']), 4096, 10**4,
	                        rng_seed=2, gate=gate)
	rows.append({'eps'                : eps,
	             'displacement'       : disp['lhs'],
	             'displacement_bound' : disp['rhs'],
	             'displacement_margin': disp['margin'],
	             'free_area'          : disc['area'],
	             'free_area_exact'    : exact,
	             'free_area_error'    : abs(disc['area'] - exact) / exact,
	             'kac_product'        : kac['kac_product']})

print_min_max([r['free_area_error'] for r in rows], '::: free-disc area error')
write_csv(rows, list(rows[0]), out_dir + 'rigid_rotation.csv')
