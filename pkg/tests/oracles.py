"""Brute-force reference implementations, deliberately free of the package's code paths."""
from fractions import Fraction
from decimal import Decimal, getcontext

getcontext().prec = 50


def dense_rows(A):
    return [list(map(int, row)) for row in A.toarray()]


def brute_score(a, b, similarity):
    if similarity == "intersection":
        return sum(min(x, y) for x, y in zip(a, b))
    na2 = sum(x * x for x in a)
    nb2 = sum(y * y for y in b)
    if na2 == 0 or nb2 == 0:
        return 0.0
    exact = Decimal(sum(x * y for x, y in zip(a, b))) / (Decimal(na2 * nb2).sqrt())
    return float(exact.quantize(Decimal("1e-12")))


def brute_topk_per_node(rows, similarity, k):
    out = []
    for i, a in enumerate(rows):
        scored = [(brute_score(a, b, similarity), j) for j, b in enumerate(rows) if j != i]
        scored = [(s, j) for s, j in scored if s > 0]
        scored.sort(key=lambda t: (-t[0], t[1]))
        out.extend((i, j, s) for s, j in scored[:k])
    return out


def brute_topk_global(rows, similarity, lam):
    scored = []
    n = len(rows)
    for i in range(n):
        for j in range(i + 1, n):
            s = brute_score(rows[i], rows[j], similarity)
            if s > 0:
                scored.append((s, i, j))
    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    return [(i, j, s) for s, i, j in scored[:lam]]


def brute_bias(adj, labels):
    """Eq.-style median offset with lower-middle median, on exact fractions."""
    n = len(labels)
    prevalence = Fraction(sum(labels), n)
    vals = []
    for i in range(n):
        if labels[i] == 1 and adj[i]:
            vals.append(Fraction(sum(labels[j] for j in adj[i]), len(adj[i])) - prevalence)
    vals.sort()
    return vals[(len(vals) - 1) // 2], len(vals)


def bfs_distances(adj, source):
    dist = {source: 0}
    queue = [source]
    for u in queue:
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist
