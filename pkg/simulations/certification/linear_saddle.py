from clslvr import *
import numpy as np

# the saddle diag(2, 1/2) : its only periodic point is the origin :
f       = LinearSaddle(2.0)
q       = 8
out_dir = './results/linear_saddle/'

cert = search_and_certify(f, q, 'auto')
write_json(cert, out_dir + 'certificate.json')
rows = cert.diagnostic_rows()
write_csv(rows, sorted(set(k for r in rows for k in r)),
          out_dir + 'diagnostics.csv')

L  = cert.period
ev = np.sort(np.abs(cert.spectrum.eigenvalues))
print_text("::: regime %s, period %i, degree %i :::"
           % (cert.regime, L, cert.degree), cls=cert)
print_text("::: |z| = %.3e, eigenvalues %s, expected %s :::"
           % (np.linalg.norm(cert.fixed_point), ev, [2.0**-L, 2.0**L]),
           cls=cert)

rep = verify_certificate(None, read_json(out_dir + 'certificate.json'))
print_text("::: re-verification : %s :::" % rep, cls=cert)
