from .lfp import (DomainBounds, GroundTermCapException, bounded_lfp, goal_violated, ground_atom, restrict, to_python,
                  to_term)
