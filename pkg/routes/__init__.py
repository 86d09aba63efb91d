"""Routes package initialization"""

from .states import entropy, holevo, fidelity
from .operations import dist_ops, fid_ops, capacity, eb_check
from .unitaries import su2, pair, min_copies, copies_bound
from .searches import paradox, order_search
from .verify import verify as verify_command
from .fixtures import fixtures as fixtures_command

# List of all commands to register
ALL_COMMANDS = [
    entropy,
    holevo,
    fidelity,
    dist_ops,
    fid_ops,
    capacity,
    eb_check,
    su2,
    pair,
    min_copies,
    copies_bound,
    paradox,
    order_search,
    verify_command,
    fixtures_command,
]
