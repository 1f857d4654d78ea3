# Sparse greedy subset selection
