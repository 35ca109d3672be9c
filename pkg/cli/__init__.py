from .main import build_parser, main
from .runConfig import RunConfig, SEED_ENVIRONMENT
