from setuptools import setup

setup(  name             = 'clslvr',
        version          = '2026.1.0',
        description      = 'Finitary hyperbolicity and rigidity experiments ' \
                           'for area-preserving maps of the plane',
        license          = 'LGPL-3',
        packages         = ['clslvr'],
        package_dir      = {'clslvr' : 'clslvr'},
        python_requires  = '>=3.8',
        install_requires = ['numpy', 'scipy', 'sympy', 'mpmath', 'shapely',
                            'colored', 'termcolor', 'more_itertools'],
        extras_require   = {'test' : ['pytest']},
        entry_points     = {'console_scripts' :
                            ['clslvr = clslvr.cli:main']}  )



