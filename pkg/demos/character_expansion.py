"""
A supercharacter of L(m, m2) three ways: from its closed forms, from the
Appell-Lerch definition, and as an exact q-expansion whose coefficients
live in a cyclotomic field.

    python3 demos/character_expansion.py
"""

from mocktheta.characters import ModuleLabel, char_expand, char_general, char_via_definition
from mocktheta.numeric import residual
from mocktheta.series import TruncationBox

label = ModuleLabel(3, 2)
tau, z = "0.02+1.1i", "0.07+0.04i"

closed = char_general(label, "minus", tau, z)
defn = char_via_definition(label, "minus", tau, z)
print(f"level {label.level}, closed forms {complex(closed):.12g}")
print(f"definition          {complex(defn):.12g}   residual {residual(closed, defn):.1e}")

series = char_expand(label, "minus", TruncationBox.single(2, (-6, 6)))
print(f"\nexpansion below q^2 ({len(series.terms)} terms), leading q-exponent {series.leading_q()}:")
for mono, coeff in series.sorted_terms()[:12]:
    print(f"  {coeff}  *  {mono}")
embedded = series.embed("1.2i", "0.05+0.2i")
print(f"\nembedded at tau = 1.2i: residual vs definition "
      f"{residual(embedded, char_via_definition(label, 'minus', '1.2i', '0.05+0.2i')):.1e} (truncation only)")
