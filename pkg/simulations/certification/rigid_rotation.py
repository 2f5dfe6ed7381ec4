from clslvr import *

# no false positives : a rigid rotation has no good point at any level
f  = RigidRotation(0.1)
gp = goodpoint_search(f, 10**4, 'auto', {'seeds' : 32})
if isinstance(gp, NotFound):
	print_text("::: rigid rotation : %s :::" % gp.reason, cls=f)
	print_params('search statistics', gp.statistics, cls=f)
else:
	print_text(">>> a rigid rotation produced a good point <<<", 'red', 1)
