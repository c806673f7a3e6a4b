"""
Window moves and k-interchange neighborhoods
============================================

A k-interchange rearranges one contiguous block of k positions.  This script
builds a few neighborhoods by hand and shows how they grow with k.
"""

from kinterchange import WindowMove, apply_move, k_neighborhood, lex_rank, make_permutation
from kinterchange.perm import window_moves

s = make_permutation((1, 2, 3, 4))

# Adjacent transpositions are the k=2 moves.
print("V^2(1234):", sorted(p.compact() for p in k_neighborhood(s, 2)))

# At k=3 two windows each allow five rearrangements, but 1324 is produced by
# both of them, so the neighborhood has nine points rather than ten.
raw = [apply_move(s, m).compact() for m in window_moves(4, 3)]
print("raw k=3 results:", raw)
print("V^3(1234):", sorted(p.compact() for p in k_neighborhood(s, 3)))

# A single move, spelled out: slot i of the new window takes old slot arrangement[i].
m = WindowMove(start=2, k=3, arrangement=(2, 3, 1))
t = apply_move(make_permutation((4, 3, 1, 2)), m)
print(f"{m.to_dict()} applied to 4312 gives {t.compact()}; inverse restores {apply_move(t, m.inverse()).compact()}")

for n in (4, 5, 6):
    ident = make_permutation(range(1, n + 1))
    sizes = [len(k_neighborhood(ident, k)) for k in range(2, n + 1)]
    print(f"n={n}: |V^k| for k=2..{n} = {sizes}")

print("lexicographic rank of 3124:", lex_rank(make_permutation((3, 1, 2, 4))))
