import pytest

from scsa.games import canonical_state, load_config
from scsa.games.config import from_dict, to_dict


def board(game, rows, to_move=0, **changes):
    """Canonical state drawn on a custom map; other config keys from the bundled file."""
    data = to_dict(load_config(game))
    data["map"] = list(rows)
    for key, value in changes.items():
        if key == "options":
            data.setdefault("options", {}).update(value)
        else:
            data[key] = value
    state = canonical_state(from_dict(data))
    if to_move:
        state = state.replace(to_move=to_move, first=to_move)
    return state


@pytest.fixture
def make_board():
    return board
