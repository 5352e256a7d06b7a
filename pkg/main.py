from chiral_diode import __version__


def define_env(env) -> None:
    env.variables.version = __version__
