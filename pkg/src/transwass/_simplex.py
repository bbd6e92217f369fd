"""JIT-compiled primal network simplex for uncapacitated min-cost flow.

Array-based spanning-tree implementation (parent / preorder-thread /
subtree-size bookkeeping) with:

- integer supplies and flows; float arc costs are quantized onto an
  integer grid that doubles represent exactly, so reduced-cost tests are
  exact and float noise cannot cause cycling (objectives are reported
  with the raw costs);
- block-search candidate-list pricing (block size ~ sqrt(arc count)),
  Dantzig's rule inside a block, Bland-style rotation across blocks;
- a strongly feasible initial basis (artificial arcs to a virtual root)
  and Cunningham's leaving-arc rule, so degenerate pivots cannot cycle;
- an optional implicit dense-bipartite mode: arc ``a`` stands for the
  pair ``(i, j) = divmod(a, n)`` and its cost ``sum_s |x_i^s - y_j^s|^p``
  is computed on the fly, so the m*n cost matrix is never materialized.

Only tree arcs can carry flow (there are no finite capacities), so flow is
stored per node on the arc to its parent; memory stays O(nodes) even with
10^8 implicit arcs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_INFEASIBLE = 1
STATUS_PIVOT_LIMIT = 2


@njit(cache=True, nogil=True, inline="always")
def _pow_cost(diff, pexp):
    if pexp == 2.0:
        return diff * diff
    if pexp == 1.0:
        return abs(diff)
    return abs(diff) ** pexp


@njit(cache=True, nogil=True)
def simplex_core(supply, tails, heads, costs, implicit, xpos, ypos, pexp,
                 pivot_cap, init_arcs):
    """Solve the uncapacitated min-cost flow problem to optimality.

    Parameters
    ----------
    supply : int64[N], summing to zero (positive = source).
    tails, heads : int64[E] arc endpoints (ignored when ``implicit``).
    costs : float64[E] arc costs, or empty in implicit mode to compute
        costs from positions on the fly.
    implicit : bool, dense bipartite topology ``i -> m + j``.
    xpos, ypos : float64[(m, d)], float64[(n, d)] (implicit mode only).
    pexp : cost exponent for implicit costs.
    pivot_cap : hard bound on pivots (safety net).
    init_arcs : int64[:], arcs of a previous basis to warm-start from
        (tree flows depend only on the supplies, so a basis stays feasible
        when only the costs change); empty for a cold start.

    Returns
    -------
    (status, objective, basic_arcs, basic_flows, potentials)
    with one (arc, flow) pair per basic arc carrying positive flow.
    """
    N = supply.shape[0]
    root = N
    if implicit:
        m = xpos.shape[0]
        n_y = ypos.shape[0]
        E = m * n_y
    else:
        m = 0
        n_y = 1
        E = tails.shape[0]
    have_costs = costs.shape[0] == E and E > 0

    art_src = np.empty(N, np.bool_)
    for v in range(N):
        art_src[v] = supply[v] >= 0

    # Upper bound on any single arc cost, for the big-M artificial cost.
    cmax = 0.0
    if have_costs:
        for a in range(E):
            if costs[a] > cmax:
                cmax = costs[a]
    elif implicit:
        for s in range(xpos.shape[1]):
            lo = xpos[0, s]
            hi = xpos[0, s]
            for i in range(m):
                if xpos[i, s] < lo:
                    lo = xpos[i, s]
                if xpos[i, s] > hi:
                    hi = xpos[i, s]
            for j in range(n_y):
                if ypos[j, s] < lo:
                    lo = ypos[j, s]
                if ypos[j, s] > hi:
                    hi = ypos[j, s]
            cmax += _pow_cost(hi - lo, pexp)
    # Quantize costs onto an integer grid that doubles represent exactly:
    # potentials stay below 2^53, so every reduced-cost comparison is exact
    # and degenerate pivoting cannot be driven by float noise (which can
    # cycle forever on tie-heavy inputs).  The returned objective is
    # re-evaluated with the raw costs.
    cbound = 2.0 ** 50 / (N + 2.0)
    cscale = (cbound - 1.0) / cmax if cmax > 0.0 else 1.0
    cmax_q = np.rint(cmax * cscale)
    faux = 3.0 * (cmax_q + 1.0) * (N + 1)
    tol = 0.5

    def arc_tail(a):
        if a < E:
            if implicit:
                return a // n_y
            return tails[a]
        v = a - E
        if art_src[v]:
            return v
        return root

    def arc_head(a):
        if a < E:
            if implicit:
                return m + a % n_y
            return heads[a]
        v = a - E
        if art_src[v]:
            return root
        return v

    def raw_cost(a):
        if have_costs:
            return costs[a]
        i = a // n_y
        j = a - i * n_y
        c = 0.0
        for s in range(xpos.shape[1]):
            c += _pow_cost(xpos[i, s] - ypos[j, s], pexp)
        return c

    def arc_cost(a):
        if a >= E:
            return faux
        return np.rint(raw_cost(a) * cscale)

    # Initial spanning tree: every node hangs off the virtual root via its
    # artificial arc (oriented toward the root for zero-supply nodes, which
    # makes the basis strongly feasible).
    parent = np.empty(N + 1, np.int64)
    edge_arc = np.empty(N + 1, np.int64)
    edge_flow = np.zeros(N + 1, np.int64)
    size = np.empty(N + 1, np.int64)
    nxt = np.empty(N + 1, np.int64)
    prv = np.empty(N + 1, np.int64)
    last = np.empty(N + 1, np.int64)
    pi = np.empty(N + 1, np.float64)

    for v in range(N):
        parent[v] = root
        edge_arc[v] = E + v
        f = supply[v]
        edge_flow[v] = f if f >= 0 else -f
        size[v] = 1
        nxt[v] = v + 1 if v + 1 < N else root
        prv[v] = v - 1 if v > 0 else root
        last[v] = v
        pi[v] = faux if art_src[v] else -faux
    parent[root] = -1
    edge_arc[root] = -1
    size[root] = N + 1
    nxt[root] = 0
    prv[root] = N - 1
    last[root] = N - 1
    pi[root] = 0.0

    if init_arcs.shape[0] > 0:
        # --- warm start: rebuild the tree from a previous basis ---
        # The given arcs form a forest (a subset of an old basis); every
        # component is hung off the root by its artificial arc and the
        # unique tree flows are recomputed from the supplies.
        K = init_arcs.shape[0]
        at = np.empty(K, np.int64)
        ah = np.empty(K, np.int64)
        deg = np.zeros(N, np.int64)
        for idx in range(K):
            a = init_arcs[idx]
            at[idx] = arc_tail(a)
            ah[idx] = arc_head(a)
            deg[at[idx]] += 1
            deg[ah[idx]] += 1
        off = np.empty(N + 1, np.int64)
        off[0] = 0
        for v in range(N):
            off[v + 1] = off[v] + deg[v]
        adj = np.empty(2 * K, np.int64)
        cur = np.empty(N, np.int64)
        for v in range(N):
            cur[v] = off[v]
        for idx in range(K):
            adj[cur[at[idx]]] = idx
            cur[at[idx]] += 1
            adj[cur[ah[idx]]] = idx
            cur[ah[idx]] += 1
        visited = np.zeros(N, np.bool_)
        order = np.empty(N, np.int64)
        cnt = 0
        ok = True
        for sv in range(N):
            if visited[sv]:
                continue
            visited[sv] = True
            parent[sv] = root
            edge_arc[sv] = E + sv
            edge_flow[sv] = 0
            order[cnt] = sv
            cnt += 1
            qh = cnt - 1
            while qh < cnt:
                v0 = order[qh]
                qh += 1
                for ptr in range(off[v0], off[v0 + 1]):
                    idx = adj[ptr]
                    w0 = ah[idx] if at[idx] == v0 else at[idx]
                    if not visited[w0]:
                        visited[w0] = True
                        parent[w0] = v0
                        edge_arc[w0] = init_arcs[idx]
                        edge_flow[w0] = 0
                        order[cnt] = w0
                        cnt += 1
        # flows: children (later in BFS order) before parents.  Strong
        # feasibility demands every degenerate arc point toward the root;
        # zero-flow arcs oriented parent->child are re-hung on their
        # (degenerate, root-pointing) artificial arc instead.
        net = np.empty(N, np.int64)
        for v in range(N):
            net[v] = supply[v]
        for k in range(cnt - 1, -1, -1):
            v0 = order[k]
            a = edge_arc[v0]
            f = net[v0]
            p0 = parent[v0]
            if p0 != root:
                net[p0] += f
            if a >= E:
                art_src[v0] = f >= 0
                edge_flow[v0] = f if f >= 0 else -f
            elif arc_tail(a) == v0:
                if f < 0:
                    ok = False
                edge_flow[v0] = f if f > 0 else 0
            else:
                if f > 0:
                    ok = False
                edge_flow[v0] = -f if f < 0 else 0
                if f == 0:
                    edge_arc[v0] = E + v0
                    art_src[v0] = True
                    parent[v0] = root
        if ok:
            # children lists -> preorder -> thread/size/last/potentials
            ccnt = np.zeros(N + 2, np.int64)
            for v in range(N):
                ccnt[parent[v] + 1] += 1
            coff = np.empty(N + 2, np.int64)
            coff[0] = 0
            for v in range(N + 1):
                coff[v + 1] = coff[v] + ccnt[v + 1]
            child = np.empty(N, np.int64)
            ccur = np.empty(N + 1, np.int64)
            for v in range(N + 1):
                ccur[v] = coff[v]
            for v in range(N):
                child[ccur[parent[v]]] = v
                ccur[parent[v]] += 1
            pre = np.empty(N + 1, np.int64)
            stack = np.empty(N + 1, np.int64)
            stack[0] = root
            sp = 1
            pcount = 0
            while sp > 0:
                sp -= 1
                v0 = stack[sp]
                pre[pcount] = v0
                pcount += 1
                for ci in range(coff[v0 + 1] - 1, coff[v0] - 1, -1):
                    stack[sp] = child[ci]
                    sp += 1
            for i in range(N + 1):
                v0 = pre[i]
                nxt[v0] = pre[i + 1] if i < N else pre[0]
                prv[v0] = pre[i - 1] if i > 0 else pre[N]
                size[v0] = 1
            for i in range(N, 0, -1):
                size[parent[pre[i]]] += size[pre[i]]
            ipos = np.empty(N + 1, np.int64)
            for i in range(N + 1):
                ipos[pre[i]] = i
            for v in range(N + 1):
                last[v] = pre[ipos[v] + size[v] - 1]
            pi[root] = 0.0
            for i in range(1, N + 1):
                v0 = pre[i]
                a = edge_arc[v0]
                ca_ = arc_cost(a)
                if arc_head(a) == v0:
                    pi[v0] = pi[parent[v0]] - ca_
                else:
                    pi[v0] = pi[parent[v0]] + ca_
        else:
            # defensive fallback: rebuild the artificial star
            for v in range(N):
                parent[v] = root
                edge_arc[v] = E + v
                f = supply[v]
                edge_flow[v] = f if f >= 0 else -f
                size[v] = 1
                nxt[v] = v + 1 if v + 1 < N else root
                prv[v] = v - 1 if v > 0 else root
                last[v] = v
                pi[v] = faux if art_src[v] else -faux
            parent[root] = -1
            edge_arc[root] = -1
            size[root] = N + 1
            nxt[root] = 0
            prv[root] = N - 1
            last[root] = N - 1
            pi[root] = 0.0

    path_u = np.empty(N + 1, np.int64)
    path_v = np.empty(N + 1, np.int64)

    B = np.int64(np.ceil(np.sqrt(E))) if E > 0 else np.int64(1)
    if B < 1:
        B = 1
    nblocks = (E + B - 1) // B if E > 0 else 0
    misses = 0
    fpos = np.int64(0)
    pivots = 0
    status = STATUS_OK
    refine_rounds = 0

    while E > 0:
        # --- pricing: rotate through blocks, best candidate per block ---
        entering = np.int64(-1)
        while misses < nblocks:
            best = np.int64(-1)
            bestc = -tol
            for off in range(B):
                a = fpos + off
                if a >= E:
                    a -= E
                red = arc_cost(a) - pi[arc_tail(a)] + pi[arc_head(a)]
                if red < bestc:
                    bestc = red
                    best = a
            fpos += B
            if fpos >= E:
                fpos -= E
            if best >= 0:
                entering = best
                misses = 0
                break
            misses += 1
        if entering < 0:
            # No eligible arc under the current (incrementally updated)
            # potentials.  Recompute potentials exactly from the tree and
            # rescan once to wash out float drift before declaring optimal.
            pi[root] = 0.0
            z = root
            for _ in range(N):
                z = nxt[z]
                a = edge_arc[z]
                if arc_head(a) == z:
                    pi[z] = pi[parent[z]] - arc_cost(a)
                else:
                    pi[z] = pi[parent[z]] + arc_cost(a)
            if refine_rounds >= 2:
                break
            refine_rounds += 1
            misses = 0
            continue

        u = arc_tail(entering)
        v = arc_head(entering)

        # --- cycle: paths from u and v up to their lowest common ancestor ---
        lu = 0
        lv = 0
        pu = u
        pv = v
        while pu != pv:
            if size[pu] < size[pv]:
                path_u[lu] = pu
                lu += 1
                pu = parent[pu]
            elif size[pu] > size[pv]:
                path_v[lv] = pv
                lv += 1
                pv = parent[pv]
            else:
                path_u[lu] = pu
                lu += 1
                pu = parent[pu]
                path_v[lv] = pv
                lv += 1
                pv = parent[pv]

        # --- leaving arc: minimum residual, scanning the cycle in reverse
        # orientation starting below the apex (Cunningham's rule; ties keep
        # the first hit, which is the last blocking arc along the cycle) ---
        delta = np.int64(-1)  # -1 encodes +infinity
        leave = np.int64(-1)
        leave_on_u = False
        for k in range(lv - 1, -1, -1):
            c = path_v[k]
            if arc_head(edge_arc[c]) == c:  # against the v->apex direction
                f = edge_flow[c]
                if delta < 0 or f < delta:
                    delta = f
                    leave = c
                    leave_on_u = False
        for k in range(lu):
            c = path_u[k]
            if arc_tail(edge_arc[c]) == c:  # against the apex->u direction
                f = edge_flow[c]
                if delta < 0 or f < delta:
                    delta = f
                    leave = c
                    leave_on_u = True
        if leave < 0:
            # All-cycle-aligned would mean a negative directed cycle, which
            # nonnegative costs exclude.
            status = STATUS_PIVOT_LIMIT
            break

        # --- augment flow around the cycle ---
        if delta > 0:
            refine_rounds = 0  # real progress; allow a fresh exact rescan
            for k in range(lu):
                c = path_u[k]
                if arc_tail(edge_arc[c]) == c:
                    edge_flow[c] -= delta
                else:
                    edge_flow[c] += delta
            for k in range(lv):
                c = path_v[k]
                if arc_head(edge_arc[c]) == c:
                    edge_flow[c] -= delta
                else:
                    edge_flow[c] += delta

        # --- basis exchange: drop the leaving tree arc, re-root the
        # detached subtree at the entering arc's endpoint, reattach ---
        t = leave
        if leave_on_u:
            att_parent = v
            att_child = u
        else:
            att_parent = u
            att_child = v

        # remove_edge(parent[t], t)
        s = parent[t]
        size_t = size[t]
        prev_t = prv[t]
        last_t = last[t]
        next_last_t = nxt[last_t]
        parent[t] = -1
        edge_arc[t] = -1
        edge_flow[t] = 0
        nxt[prev_t] = next_last_t
        prv[next_last_t] = prev_t
        nxt[last_t] = t
        prv[t] = last_t
        w = s
        while w != -1:
            size[w] -= size_t
            if last[w] == last_t:
                last[w] = prev_t
            w = parent[w]

        # make_root(att_child) inside the detached subtree
        la = 0
        q = att_child
        while q != -1:
            path_u[la] = q
            la += 1
            q = parent[q]
        for idx in range(la - 1, 0, -1):
            p_ = path_u[idx]
            q_ = path_u[idx - 1]
            size_p = size[p_]
            last_p = last[p_]
            prev_q = prv[q_]
            last_q = last[q_]
            next_last_q = nxt[last_q]
            parent[p_] = q_
            parent[q_] = -1
            edge_arc[p_] = edge_arc[q_]
            edge_flow[p_] = edge_flow[q_]
            edge_arc[q_] = -1
            edge_flow[q_] = 0
            size[p_] = size_p - size[q_]
            size[q_] = size_p
            nxt[prev_q] = next_last_q
            prv[next_last_q] = prev_q
            nxt[last_q] = q_
            prv[q_] = last_q
            if last_p == last_q:
                last[p_] = prev_q
                last_p = prev_q
            prv[p_] = last_q
            nxt[last_q] = p_
            nxt[last_p] = q_
            prv[q_] = last_p
            last[q_] = last_p

        # add_edge(entering, att_parent, att_child)
        p_ = att_parent
        q_ = att_child
        last_p = last[p_]
        next_last_p = nxt[last_p]
        size_q = size[q_]
        last_q = last[q_]
        parent[q_] = p_
        edge_arc[q_] = entering
        edge_flow[q_] = delta
        nxt[last_p] = q_
        prv[q_] = last_p
        prv[next_last_p] = last_q
        nxt[last_q] = next_last_p
        w = p_
        while w != -1:
            size[w] += size_q
            if last[w] == last_p:
                last[w] = last_q
            w = parent[w]

        # update potentials over the reattached subtree
        ca = arc_cost(entering)
        if q_ == arc_head(entering):
            dpi = pi[p_] - ca - pi[q_]
        else:
            dpi = pi[p_] + ca - pi[q_]
        z = q_
        pi[z] += dpi
        lq = last[q_]
        while z != lq:
            z = nxt[z]
            pi[z] += dpi

        pivots += 1
        if pivots >= pivot_cap:
            status = STATUS_PIVOT_LIMIT
            break

    # --- harvest solution ---
    feasible = True
    for v in range(N):
        if edge_arc[v] >= E and edge_flow[v] > 0:
            feasible = False
    cnt = 0
    out_arcs = np.empty(N, np.int64)
    out_flows = np.empty(N, np.int64)
    obj = 0.0
    for v in range(N):
        a = edge_arc[v]
        if 0 <= a < E and edge_flow[v] > 0:
            out_arcs[cnt] = a
            out_flows[cnt] = edge_flow[v]
            obj += edge_flow[v] * raw_cost(a)
            cnt += 1
    if not feasible and status == STATUS_OK:
        status = STATUS_INFEASIBLE
    inv = 1.0 / cscale
    for v in range(N + 1):
        pi[v] *= inv
    return status, obj, out_arcs[:cnt], out_flows[:cnt], pi


@njit(cache=True, nogil=True)
def min_reduced_cost(tails, heads, costs, pi):
    """Smallest reduced cost over explicit arcs (optimality certificate)."""
    best = np.inf
    for a in range(tails.shape[0]):
        red = costs[a] - pi[tails[a]] + pi[heads[a]]
        if red < best:
            best = red
    return best
