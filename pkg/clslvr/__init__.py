__version__    = '2026.1.0'
__license__    = 'LGPL-3'

# clslvr classes and operations :
from .helper      import *
from .inputoutput import *
from .arithmetic  import *
from .maps        import *
from .cocycle     import *
from .certifier   import *
from .rigidity    import *
