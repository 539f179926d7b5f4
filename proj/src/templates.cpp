#include "vassavg/templates.hpp"

#include "vassavg/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace vass {

size_t Template::size() const {
    size_t total = 0;
    for (const Path& p : connectors) total += p.size();
    for (const Path& p : cycles) total += p.size();
    return total;
}

namespace {

// Pieces in template order: alpha_0, beta_1, alpha_1, ..., beta_p, alpha_p.
std::vector<const Path*> pieces_of(const Template& tpl) {
    std::vector<const Path*> pieces;
    const int p = tpl.cycle_count();
    for (int i = 0; i <= p; ++i) {
        pieces.push_back(&tpl.connectors[i]);
        if (i < p) pieces.push_back(&tpl.cycles[i]);
    }
    return pieces;
}

}  // namespace

void validate_template(const Vass& a, const Template& tpl) {
    if (tpl.connectors.size() != tpl.cycles.size() + 1)
        throw StructuralError("template: needs exactly one more connector than cycles");
    for (const Path& beta : tpl.cycles)
        if (!beta.empty() && !is_cycle(a, beta))
            throw StructuralError("template: nonempty beta is not a cycle");
    for (const Path& alpha : tpl.connectors)
        if (!is_chained(a, alpha)) throw StructuralError("template: connector not chained");

    int current = -1;  // unknown until the first nonempty piece
    int first = -1;
    for (const Path* piece : pieces_of(tpl)) {
        if (piece->empty()) continue;
        const int s = path_start(a, *piece);
        if (current != -1 && s != current)
            throw StructuralError("template: pieces do not chain");
        if (first == -1) first = s;
        current = path_end(a, *piece);
    }
    if (first != -1 && current != first)
        throw StructuralError("template: concatenation is not a cycle");
}

int template_start(const Vass& a, const Template& tpl) {
    for (const Path* piece : pieces_of(tpl))
        if (!piece->empty()) return path_start(a, *piece);
    return -1;
}

bool is_minimal_template(const Vass& a, const Template& tpl) {
    validate_template(a, tpl);
    for (const Path& alpha : tpl.connectors)
        if (static_cast<int>(alpha.size()) >= a.state_count()) return false;
    for (size_t i = 0; i < tpl.cycles.size(); ++i) {
        const Path& beta = tpl.cycles[i];
        if (beta.empty()) return false;
        // simple: no repeated source state
        std::vector<bool> seen(a.state_count(), false);
        for (int t : beta) {
            if (seen[a.transitions[t].source]) return false;
            seen[a.transitions[t].source] = true;
        }
        for (size_t j = i + 1; j < tpl.cycles.size(); ++j)
            if (tpl.cycles[j] == beta) return false;
    }
    return true;
}

Path instantiate(const Template& tpl, const Multiplicities& n) {
    if (n.size() != tpl.cycle_count())
        throw StructuralError("instantiate: multiplicity count mismatch");
    for (Index i = 0; i < n.size(); ++i)
        if (n(i) < 0) throw StructuralError("instantiate: negative multiplicity");
    Path out = tpl.connectors[0];
    for (int i = 0; i < tpl.cycle_count(); ++i) {
        if (!n(i).fits_slong_p())
            throw StructuralError("instantiate: multiplicity does not fit");
        const long reps = n(i).get_si();
        for (long r = 0; r < reps; ++r)
            out.insert(out.end(), tpl.cycles[i].begin(), tpl.cycles[i].end());
        out.insert(out.end(), tpl.connectors[i + 1].begin(), tpl.connectors[i + 1].end());
    }
    return out;
}

Path connector_cycle(const Template& tpl) {
    Path out;
    for (const Path& alpha : tpl.connectors) out.insert(out.end(), alpha.begin(), alpha.end());
    return out;
}

TemplateCoefficients template_coefficients(const Vass& a, const CostFunction& f,
                                           const Template& tpl) {
    validate_template(a, tpl);
    const int p = tpl.cycle_count();
    std::vector<IntVec> gain(p), vals(p);
    std::vector<Int> sum0(p);
    for (int i = 0; i < p; ++i) {
        gain[i] = gain_of(a, tpl.cycles[i]);
        vals[i] = vals_of(a, f, tpl.cycles[i]);
        sum0[i] = sum_from(a, f, IntVec::Zero(a.dimension), tpl.cycles[i]);
    }
    std::vector<IntVec> conn_gain(p + 1), conn_vals(p + 1);
    for (int i = 0; i <= p; ++i) {
        conn_gain[i] = gain_of(a, tpl.connectors[i]);
        conn_vals[i] = vals_of(a, f, tpl.connectors[i]);
    }

    TemplateCoefficients coeffs;
    coeffs.B = IntMat(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            coeffs.B(i, j) = gain[std::min(i, j)].dot(vals[std::max(i, j)]);

    coeffs.c = IntVec(p);
    for (int i = 0; i < p; ++i) {
        // cycle i sits between connector i and connector i+1
        IntVec gain_before = IntVec::Zero(a.dimension);  // alpha_0 .. alpha_i
        for (int u = 0; u <= i; ++u) gain_before += conn_gain[u];
        IntVec vals_after = IntVec::Zero(a.dimension);   // alpha_{i+1} .. alpha_p
        for (int j = i + 1; j <= p; ++j) vals_after += conn_vals[j];
        coeffs.c(i) = 2 * sum0[i] - gain[i].dot(vals[i]) + 2 * gain_before.dot(vals[i]) +
                      2 * gain[i].dot(vals_after);
    }
    coeffs.e = 2 * sum_from(a, f, IntVec::Zero(a.dimension), connector_cycle(tpl));
    return coeffs;
}

IntMat balance_matrix(const Vass& a, const CostFunction& f, const Template& tpl) {
    validate_template(a, tpl);
    const int p = tpl.cycle_count();
    std::vector<IntVec> gain, vals;
    for (int i = 0; i < p; ++i) {
        gain.push_back(gain_of(a, tpl.cycles[i]));
        vals.push_back(vals_of(a, f, tpl.cycles[i]));
    }
    const Path closing = connector_cycle(tpl);
    gain.push_back(gain_of(a, closing));
    vals.push_back(vals_of(a, f, closing));

    IntMat m(p + 1, p + 1);
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j)
            m(i, j) = gain[i].dot(vals[j]) + gain[j].dot(vals[i]);
    return m;
}

Template extended_template(const Template& tpl) {
    Template ext = tpl;
    ext.cycles.push_back(connector_cycle(tpl));
    ext.connectors.push_back({});
    return ext;
}

Template reversed_template(const Template& tpl) {
    const int p = tpl.cycle_count();
    const auto& alpha = tpl.connectors;
    const auto slice = [&](int from, int to) {  // alpha_from ... alpha_to
        Path out;
        for (int i = from; i <= to; ++i) out.insert(out.end(), alpha[i].begin(), alpha[i].end());
        return out;
    };

    Template rev;
    rev.cycles.push_back(connector_cycle(tpl));  // beta_{p+1} first
    for (int i = p; i >= 1; --i) rev.cycles.push_back(tpl.cycles[i - 1]);

    rev.connectors.push_back({});  // before beta_{p+1}
    if (p >= 1) {
        rev.connectors.push_back(slice(0, p - 1));  // to the start of beta_p
        for (int j = 2; j <= p; ++j) {
            // after beta_{p+2-j}, loop around to the start of beta_{p+1-j}
            Path c = slice(p + 2 - j, p);
            Path tail = slice(0, p - j);
            c.insert(c.end(), tail.begin(), tail.end());
            rev.connectors.push_back(std::move(c));
        }
        rev.connectors.push_back(slice(1, p));  // closing piece
    } else {
        rev.connectors.push_back({});
    }
    return rev;
}

LinearData linear_data(const Vass& a, const CostFunction& f, const Template& tpl) {
    validate_template(a, tpl);
    const int p = tpl.cycle_count();
    const Path closing = connector_cycle(tpl);
    const IntVec g_close = gain_of(a, closing);
    const IntVec v_close = vals_of(a, f, closing);

    LinearData data;
    data.d = IntVec(p);
    for (int i = 0; i < p; ++i) {
        const IntVec g = gain_of(a, tpl.cycles[i]);
        const IntVec v = vals_of(a, f, tpl.cycles[i]);
        data.d(i) = -(g.dot(v_close) + g_close.dot(v));
    }
    data.h = -g_close.dot(v_close);
    return data;
}

TransMap trans_map(const Vass& a, const Template& tpl) {
    validate_template(a, tpl);
    const int m = a.transition_count();
    const int p = tpl.cycle_count();
    TransMap map;
    map.constant = IntVec::Zero(m);
    for (const Path& alpha : tpl.connectors)
        for (int t : alpha) map.constant(t) += 1;
    map.linear = IntMat::Zero(m, p);
    for (int i = 0; i < p; ++i)
        for (int t : tpl.cycles[i]) map.linear(t, i) += 1;
    return map;
}

namespace {

// One nonzero rational kernel vector of a wide matrix (cols > rank).
RatVec kernel_vector(const RatMat& m) {
    Eigen::FullPivLU<RatMat> lu(m);
    RatMat k = lu.kernel();
    if (k.cols() == 0 || (k.col(0).array() == Rat(0)).all())
        throw std::logic_error("kernel_vector: expected a nontrivial kernel");
    return k.col(0);
}

}  // namespace

std::vector<std::pair<Rat, Multiplicities>> decompose_short_vectors(
    const Vass& a, const Template& tpl, const Multiplicities& n) {
    validate_template(a, tpl);
    if (n.size() != tpl.cycle_count())
        throw StructuralError("decompose_short_vectors: multiplicity count mismatch");
    if ((n.array() == Int(0)).all())
        throw MisuseError("decompose_short_vectors: n must be nonzero");
    for (const Path& beta : tpl.cycles)
        if (beta.empty())
            throw MisuseError("decompose_short_vectors: cycles must be nonempty");

    const int m = a.transition_count();
    const IntMat counts = trans_map(a, tpl).linear;  // m x p, cycle part only

    std::vector<std::pair<Rat, Multiplicities>> result;

    // Iterative refinement: peel off short-support pieces until done.
    struct Item {
        Rat scale;
        IntVec vec;
    };
    std::vector<Item> work{{Rat(1), n}};
    while (!work.empty()) {
        Item item = std::move(work.back());
        work.pop_back();
        if ((item.vec.array() == Int(0)).all()) continue;

        std::vector<int> support;
        for (Index i = 0; i < item.vec.size(); ++i)
            if (item.vec(i) > 0) support.push_back(static_cast<int>(i));
        if (static_cast<int>(support.size()) <= m) {
            result.emplace_back(item.scale, item.vec);
            continue;
        }

        // Shrink the support by one using a kernel direction of the count
        // matrix restricted to the first m+1 support columns.
        RatVec x(item.vec.size());
        for (Index i = 0; i < x.size(); ++i) x(i) = Rat(item.vec(i));
        while (true) {
            std::vector<int> supp;
            for (Index i = 0; i < x.size(); ++i)
                if (x(i) > 0) supp.push_back(static_cast<int>(i));
            if (static_cast<int>(supp.size()) <= m) break;
            RatMat cols(m, m + 1);
            for (int j = 0; j <= m; ++j)
                for (int r = 0; r < m; ++r) cols(r, j) = Rat(counts(r, supp[j]));
            RatVec ker = kernel_vector(cols);
            bool has_positive = false;
            for (Index j = 0; j < ker.size(); ++j)
                if (ker(j) > 0) has_positive = true;
            if (!has_positive) ker = -ker;
            // largest step keeping x nonnegative; one support entry hits zero
            Rat step(-1);
            for (Index j = 0; j < ker.size(); ++j) {
                if (ker(j) > 0) {
                    Rat bound = x(supp[j]) / ker(j);
                    if (step < 0 || bound < step) step = bound;
                }
            }
            for (Index j = 0; j < ker.size(); ++j) x(supp[j]) -= step * ker(j);
            for (Index i = 0; i < x.size(); ++i)
                if (x(i) < 0) throw std::logic_error("decompose: negative coordinate");
        }

        // Scale x to integers: n0 with cycle counts t0 * counts(item.vec).
        Int denominator_lcm = 1;
        for (Index i = 0; i < x.size(); ++i) {
            Int den = x(i).get_den();
            denominator_lcm = lcm(denominator_lcm, den);
        }
        IntVec n0(x.size());
        for (Index i = 0; i < x.size(); ++i) {
            Rat scaled = x(i) * Rat(denominator_lcm);
            n0(i) = scaled.get_num();  // den == 1 by construction
        }

        // r maximal with item.vec - r n0 >= 0; r > 0 because supp(n0) is
        // inside supp(item.vec).
        Rat r(-1);
        for (Index i = 0; i < n0.size(); ++i) {
            if (n0(i) > 0) {
                Rat bound = make_rat(item.vec(i), n0(i));
                if (r < 0 || bound < r) r = bound;
            }
        }
        const Int q = r.get_den();
        const Int pnum = r.get_num();
        IntVec rest = q * item.vec - pnum * n0;
        for (Index i = 0; i < rest.size(); ++i)
            if (rest(i) < 0) throw std::logic_error("decompose: remainder went negative");

        result.emplace_back(item.scale * r, n0);
        if (!(rest.array() == Int(0)).all())
            work.push_back({item.scale / Rat(q), rest});
    }

    // Exact reconstruction check.
    RatVec total = RatVec::Zero(n.size());
    for (const auto& [r, z] : result)
        for (Index i = 0; i < z.size(); ++i) total(i) += r * Rat(z(i));
    for (Index i = 0; i < n.size(); ++i)
        if (total(i) != Rat(n(i))) throw std::logic_error("decompose: reconstruction failed");
    return result;
}

bool satisfies(const LinSystem& system, const Multiplicities& n) {
    if (system.lhs.cols() != n.size()) return false;
    IntVec lhs = system.lhs * n;
    for (Index r = 0; r < lhs.size(); ++r)
        if (lhs(r) != system.rhs(r)) return false;
    return true;
}

std::vector<LinSystem> balanced_linear_systems(const Vass& a, const CostFunction& f,
                                               const Template& tpl) {
    const int p = tpl.cycle_count();
    if (p > 16) throw MisuseError("balanced_linear_systems: too many cycles");
    const IntMat m = balance_matrix(a, f, tpl);

    std::vector<unsigned> subsets;
    for (unsigned mask = 0; mask < (1u << p); ++mask) subsets.push_back(mask);
    std::sort(subsets.begin(), subsets.end(), [](unsigned x, unsigned y) {
        const int cx = __builtin_popcount(x), cy = __builtin_popcount(y);
        if (cx != cy) return cx < cy;
        return x < y;
    });

    std::vector<LinSystem> systems;
    for (unsigned mask : subsets) {
        LinSystem s;
        std::vector<std::pair<IntVec, Int>> rows;
        for (int i = 0; i < p; ++i) {
            if (mask & (1u << i)) {
                s.forced_zero.push_back(i);
                IntVec row = IntVec::Zero(p);
                row(i) = 1;
                rows.emplace_back(std::move(row), Int(0));
            } else {
                // row i of A applied to (n, 1) must vanish
                IntVec row(p);
                for (int j = 0; j < p; ++j) row(j) = m(i, j);
                rows.emplace_back(std::move(row), -m(i, p));
            }
        }
        {
            // closing row p+1
            IntVec row(p);
            for (int j = 0; j < p; ++j) row(j) = m(p, j);
            rows.emplace_back(std::move(row), -m(p, p));
        }
        s.lhs = IntMat(static_cast<Index>(rows.size()), p);
        s.rhs = IntVec(static_cast<Index>(rows.size()));
        for (size_t r = 0; r < rows.size(); ++r) {
            for (int j = 0; j < p; ++j) s.lhs(static_cast<Index>(r), j) = rows[r].first(j);
            s.rhs(static_cast<Index>(r)) = rows[r].second;
        }
        systems.push_back(std::move(s));
    }
    return systems;
}

namespace {

struct Slot {
    Path cycle;
    Int multiplicity;
};

struct SlotList {
    std::vector<Path> connectors;  // slots.size() + 1
    std::vector<Slot> slots;
};

// First contiguous block with a repeated state inside a connector; returns
// (begin, end) transition positions of a simple cycle, or nothing.
std::optional<std::pair<size_t, size_t>> first_simple_cycle(const Vass& a, const Path& alpha) {
    if (alpha.empty()) return std::nullopt;
    std::map<int, size_t> position;  // state -> index of first visit
    position[a.transitions[alpha[0]].source] = 0;
    for (size_t i = 0; i < alpha.size(); ++i) {
        const int target = a.transitions[alpha[i]].target;
        auto it = position.find(target);
        if (it != position.end()) return std::make_pair(it->second, i + 1);
        position[target] = i + 1;
    }
    return std::nullopt;
}

// Extracts simple cycles out of connectors until none contains a repeat.
void extract_all(const Vass& a, SlotList& list) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t c = 0; c < list.connectors.size(); ++c) {
            const auto block = first_simple_cycle(a, list.connectors[c]);
            if (!block) continue;
            const auto [from, to] = *block;
            Path& alpha = list.connectors[c];
            Path left(alpha.begin(), alpha.begin() + from);
            Path middle(alpha.begin() + from, alpha.begin() + to);
            Path right(alpha.begin() + to, alpha.end());
            alpha = std::move(left);
            list.slots.insert(list.slots.begin() + c, {std::move(middle), Int(1)});
            list.connectors.insert(list.connectors.begin() + c + 1, std::move(right));
            changed = true;
            break;
        }
    }
}

Template slots_to_template(const SlotList& list) {
    Template tpl;
    tpl.connectors = list.connectors;
    for (const Slot& s : list.slots) tpl.cycles.push_back(s.cycle);
    return tpl;
}

Multiplicities slots_multiplicities(const SlotList& list) {
    Multiplicities n(static_cast<Index>(list.slots.size()));
    for (size_t i = 0; i < list.slots.size(); ++i) n(static_cast<Index>(i)) = list.slots[i].multiplicity;
    return n;
}

Int slot_sum(const Vass& a, const CostFunction& f, const IntVec& g, const SlotList& list) {
    return sum_from(a, f, g, instantiate(slots_to_template(list), slots_multiplicities(list)));
}

// Moves one slot's multiplicity onto the other, dropping it and joining
// the two connectors around the dropped position.
SlotList merge_variant(const SlotList& list, size_t keep, size_t drop) {
    SlotList out;
    out.slots = list.slots;
    out.connectors = list.connectors;
    out.slots[keep].multiplicity += out.slots[drop].multiplicity;
    // connector after the dropped slot folds into the one before it
    Path joined = out.connectors[drop];
    joined.insert(joined.end(), out.connectors[drop + 1].begin(), out.connectors[drop + 1].end());
    out.connectors[drop] = std::move(joined);
    out.connectors.erase(out.connectors.begin() + drop + 1);
    out.slots.erase(out.slots.begin() + drop);
    return out;
}

}  // namespace

std::pair<Template, Multiplicities> minimal_factorization(const Vass& a,
                                                          const CostFunction& f,
                                                          const Path& cycle,
                                                          const IntVec& g) {
    if (!is_cycle(a, cycle)) throw StructuralError("minimal_factorization: input not a cycle");
    if (g.size() != a.dimension)
        throw StructuralError("minimal_factorization: g has wrong dimension");

    SlotList list;
    list.connectors = {cycle};
    extract_all(a, list);

    // Group equal anchored cycles; ties resolved toward the earlier slot.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < list.slots.size() && !changed; ++i) {
            for (size_t j = i + 1; j < list.slots.size() && !changed; ++j) {
                if (list.slots[i].cycle != list.slots[j].cycle) continue;
                SlotList to_front = merge_variant(list, i, j);
                SlotList to_back = merge_variant(list, j, i);
                const Int sum_front = slot_sum(a, f, g, to_front);
                const Int sum_back = slot_sum(a, f, g, to_back);
                list = sum_front <= sum_back ? std::move(to_front) : std::move(to_back);
                extract_all(a, list);
                changed = true;
            }
        }
    }

    Template tpl = slots_to_template(list);
    Multiplicities n = slots_multiplicities(list);
    validate_template(a, tpl);
    return {std::move(tpl), std::move(n)};
}

}  // namespace vass
