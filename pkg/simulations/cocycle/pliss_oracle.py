from clslvr import *
import numpy as np

# the linear-time Pliss sweep against the enumeration of every window :
n_sequences = 500
rng         = np.random.default_rng(1)

mismatch = 0
short    = 0
for k in range(n_sequences):
	n   = int(rng.integers(1, 21))
	l   = 1.0
	seq = rng.uniform(-1.0, l, n)
	l1  = float(np.mean(seq)) - 1e-3
	l2  = l1 - float(rng.uniform(0.01, 0.5))
	if not l2 < l1 < l:
		continue
	try:
		fast = pliss_indices(seq, l, l1, l2)
	except PreconditionViolated:
		continue
	except ConsequenceViolated:
		short += 1
		continue
	brute, _ = good_index_bruteforce(seq, l2)
	if fast != brute:
		mismatch += 1

print_text("::: %i sequences : %i mismatches, %i below the lower bound :::"
           % (n_sequences, mismatch, short), '180')
