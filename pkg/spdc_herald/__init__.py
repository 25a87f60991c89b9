from spdc_herald.exceptions import *  # noqa: F403,F401
from spdc_herald.globals import *  # noqa: F403,F401
