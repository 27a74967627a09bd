#include "rieszlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "rieszlab/error.hpp"

namespace rieszlab {

void QuadratureBudget::validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0) || max_subdivisions < 1 || !(truncation_radius > 0))
        throw Error(ErrorCode::InvalidArgument, "quadrature budget out of range");
}

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    Complex value;
    double error;
    double mass; // ∫|f| by the Kronrod rule, for the roundoff floor
};

PanelEstimate gauss_kronrod(const Integrand& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Complex fc = f(c);
    Complex kronrod = fc * kWgk[7];
    Complex gauss = fc * kWg[3];
    double mass = std::abs(fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        Complex f1 = f(c - h * kXgk[j]);
        Complex f2 = f(c + h * kXgk[j]);
        kronrod += (f1 + f2) * kWgk[j];
        mass += (std::abs(f1) + std::abs(f2)) * kWgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    evals += 15;
    return {kronrod * h, std::abs((kronrod - gauss) * h), mass * std::abs(h)};
}

// Work item: either a regular panel or the extrapolated remainder of a graded
// segment next to a singular point.
struct Item {
    bool tail = false;
    bool alive = true;
    bool final = false;
    double a = 0, b = 0;
    int segment = -1;
    int piece = -1;
    Complex value;
    double error = 0;
    double mass = 0;
};

struct Graded {
    double s;     // singular point
    double dir;   // +1: segment extends to the right of s
    double len;
    std::vector<Complex> pieces;
    int tail_item = -1;
};

class Integrator {
public:
    Integrator(const Integrand& f, const QuadratureBudget& budget) : f_(f), budget_(budget) {}

    void add_regular(double a, double b) {
        auto est = gauss_kronrod(f_, a, b, evals_);
        push_item(Item{false, true, false, a, b, -1, -1, est.value, est.error, est.mass});
    }

    void add_graded(double s, double other) {
        Graded g{s, other > s ? 1.0 : -1.0, std::abs(other - s), {}, -1};
        segments_.push_back(g);
        const int id = static_cast<int>(segments_.size()) - 1;
        for (int j = 0; j < 6; ++j) add_piece(id);
        Item t;
        t.tail = true;
        t.segment = id;
        segments_[id].tail_item = push_item(t);
        refresh_tail(id);
    }

    QuadratureResult run() {
        int subdivisions = 0;
        int since_exact = 0;
        for (;;) {
            double total_err = err_sum_;
            Complex total = val_sum_;
            if (++since_exact >= 64 || total_err - frozen_err_ <= target(total)) {
                recompute_sums();
                since_exact = 0;
                total_err = err_sum_;
                total = val_sum_;
                if (total_err - frozen_err_ <= target(total)) break;
            }
            // Below this level the estimate is rounding noise.
            if (total_err - frozen_err_ <= 64 * std::numeric_limits<double>::epsilon() * mass_sum_)
                break;
            int idx = pop_largest();
            if (idx < 0)
                throw Error(ErrorCode::NonConvergence,
                            "no refinable panel left; error " + format_double(total_err));
            if (subdivisions >= budget_.max_subdivisions)
                throw Error(ErrorCode::NonConvergence,
                            "subdivision budget exhausted; error " + format_double(total_err));
            ++subdivisions;
            if (items_[idx].tail)
                deepen(items_[idx].segment);
            else
                bisect(idx);
        }
        recompute_sums();
        return {val_sum_, err_sum_, evals_};
    }

private:
    double target(Complex total) const {
        return std::max(budget_.abs_tol, budget_.rel_tol * std::abs(total));
    }

    int push_item(const Item& it) {
        items_.push_back(it);
        const int idx = static_cast<int>(items_.size()) - 1;
        val_sum_ += it.value;
        err_sum_ += it.error;
        mass_sum_ += it.mass;
        heap_.push({it.error, idx});
        return idx;
    }

    void retire(int idx) {
        Item& it = items_[idx];
        it.alive = false;
        val_sum_ -= it.value;
        err_sum_ -= it.error;
        mass_sum_ -= it.mass;
    }

    void update(int idx, Complex value, double error) {
        Item& it = items_[idx];
        val_sum_ += value - it.value;
        err_sum_ += error - it.error;
        mass_sum_ += std::abs(value) - it.mass;
        if (it.final) frozen_err_ += error - it.error;
        it.value = value;
        it.error = error;
        it.mass = std::abs(value);
        if (!it.final) heap_.push({error, idx});
    }

    void freeze(int idx) {
        Item& it = items_[idx];
        if (it.final) return;
        it.final = true;
        frozen_err_ += it.error;
    }

    int pop_largest() {
        while (!heap_.empty()) {
            auto [err, idx] = heap_.top();
            heap_.pop();
            const Item& it = items_[idx];
            if (!it.alive || it.final || err != it.error) continue;
            return idx;
        }
        return -1;
    }

    void recompute_sums() {
        ComplexSum v;
        CompensatedSum<double> e, m;
        for (const auto& it : items_) {
            if (!it.alive) continue;
            v += it.value;
            e += it.error;
            m += it.mass;
        }
        val_sum_ = v.value();
        err_sum_ = e.value();
        mass_sum_ = m.value();
    }

    void add_piece(int id) {
        Graded& g = segments_[id];
        const int j = static_cast<int>(g.pieces.size());
        const double outer = g.len * std::ldexp(1.0, -j);
        const double inner = 0.5 * outer;
        double x0 = g.s + g.dir * inner;
        double x1 = g.s + g.dir * outer;
        if (x0 > x1) std::swap(x0, x1);
        auto est = gauss_kronrod(f_, x0, x1, evals_);
        g.pieces.push_back(est.value);
        push_item(Item{false, true, false, x0, x1, id, j, est.value, est.error, est.mass});
    }

    void deepen(int id) {
        Graded& g = segments_[id];
        const int j = static_cast<int>(g.pieces.size());
        const double inner = g.len * std::ldexp(1.0, -j - 1);
        if (inner < std::numeric_limits<double>::min() * 1e10 || g.s + g.dir * inner == g.s) {
            freeze(g.tail_item);
            return;
        }
        const double before = items_[g.tail_item].error;
        add_piece(id);
        refresh_tail(id);
        // x = s + d rounds d to ulp(s), so deep pieces turn into noise; once a
        // deeper piece no longer improves the estimate the remainder is frozen.
        const Item& t = items_[g.tail_item];
        const double noise = 1e3 * std::numeric_limits<double>::epsilon() *
                             (std::abs(t.value) + std::abs(g.pieces.back())) *
                             (1.0 + std::abs(g.s) / inner);
        if (t.error >= before && t.error <= noise) freeze(g.tail_item);
    }

    void refresh_tail(int id) {
        const Graded& g = segments_[id];
        const auto& P = g.pieces;
        const std::size_t J = P.size() - 1;
        // Partial sums over the graded pieces approach the segment integral;
        // the limit is extrapolated with the epsilon algorithm.
        std::vector<Complex> sums(P.size());
        ComplexSum acc;
        for (std::size_t j = 0; j <= J; ++j) {
            acc += P[j];
            sums[j] = acc.value();
        }
        Complex tail{};
        double err;
        if (P[J] == Complex{} && P[J - 1] == Complex{}) {
            err = 0.0;
        } else {
            const std::size_t n = std::min<std::size_t>(sums.size(), 7);
            const Complex* last = sums.data() + sums.size() - n;
            Complex e0 = epsilon_limit(last, n);
            Complex e1 = epsilon_limit(last, n - 1);
            Complex e2 = epsilon_limit(last, n - 2);
            tail = e0 - sums[J];
            err = std::abs(e0 - e1) + std::abs(e0 - e2);
            if (!std::isfinite(err)) {
                tail = Complex{};
                err = 4.0 * (std::abs(P[J]) + std::abs(P[J - 1]));
            }
        }
        update(g.tail_item, tail, err);
    }

    // Wynn's epsilon table over x[0..n); returns the last entry of the
    // highest even column.
    static Complex epsilon_limit(const Complex* x, std::size_t n) {
        std::vector<Complex> before(n + 1, Complex{}), col(x, x + n), next;
        Complex best = x[n - 1];
        for (std::size_t m = 1; m < n; ++m) {
            next.assign(n - m, Complex{});
            for (std::size_t k = 0; k + m < n; ++k) {
                const Complex d = col[k + 1] - col[k];
                if (d == Complex{}) return m % 2 == 1 ? col[k + 1] : best;
                next[k] = before[k + 1] + 1.0 / d;
            }
            if (m % 2 == 0) best = next[n - m - 1];
            before = col;
            col = next;
        }
        return best;
    }

    void bisect(int idx) {
        const Item parent = items_[idx];
        const double mid = 0.5 * (parent.a + parent.b);
        if (!(mid > parent.a && mid < parent.b)) {
            freeze(idx);
            return;
        }
        retire(idx);
        auto left = gauss_kronrod(f_, parent.a, mid, evals_);
        auto right = gauss_kronrod(f_, mid, parent.b, evals_);
        push_item(Item{false, true, false, parent.a, mid, parent.segment, parent.piece, left.value,
                       left.error, left.mass});
        push_item(Item{false, true, false, mid, parent.b, parent.segment, parent.piece,
                       right.value, right.error, right.mass});
        if (parent.segment >= 0) {
            Graded& g = segments_[parent.segment];
            g.pieces[parent.piece] += left.value + right.value - parent.value;
            if (parent.piece + 3 > static_cast<int>(g.pieces.size())) refresh_tail(parent.segment);
        }
    }

    const Integrand& f_;
    QuadratureBudget budget_;
    std::vector<Item> items_;
    std::vector<Graded> segments_;
    std::priority_queue<std::pair<double, int>> heap_;
    Complex val_sum_{};
    double err_sum_ = 0;
    double mass_sum_ = 0;
    double frozen_err_ = 0;
    long evals_ = 0;
};

} // namespace

QuadratureResult integrate_singular(const Integrand& f, double a, double b,
                                    std::span<const double> singular_points,
                                    const QuadratureBudget& budget) {
    budget.validate();
    if (!(a < b)) throw Error(ErrorCode::InvalidRange, "integration range requires a < b");
    std::vector<double> sing;
    for (double s : singular_points)
        if (s >= a && s <= b) sing.push_back(s);
    std::sort(sing.begin(), sing.end());
    sing.erase(std::unique(sing.begin(), sing.end()), sing.end());

    std::vector<double> knots{a};
    for (double s : sing)
        if (s > a && s < b) knots.push_back(s);
    knots.push_back(b);
    auto is_singular = [&](double x) { return std::binary_search(sing.begin(), sing.end(), x); };

    Integrator integ(f, budget);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double l = knots[i], r = knots[i + 1];
        const bool sl = is_singular(l), sr = is_singular(r);
        if (sl && sr) {
            const double m = 0.5 * (l + r);
            integ.add_graded(l, m);
            integ.add_graded(r, m);
        } else if (sl) {
            integ.add_graded(l, r);
        } else if (sr) {
            integ.add_graded(r, l);
        } else {
            integ.add_regular(l, r);
        }
    }
    return integ.run();
}

namespace {

double split_radius(double anchor, std::span<const double> singular_points,
                    const QuadratureBudget& budget) {
    double r = std::max(budget.truncation_radius, 2.0 * std::abs(anchor) + 1.0);
    for (double s : singular_points) r = std::max(r, 2.0 * std::abs(s) + 1.0);
    return r;
}

// Integral of f over [R, inf) (dir=+1) or (-inf, -R] (dir=-1) via x = dir*R/u.
QuadratureResult mapped_tail(const Integrand& f, double R, double dir, const QuadratureBudget& budget) {
    Integrand g = [&](double u) { return f(dir * R / u) * (R / (u * u)); };
    const double zero[] = {0.0};
    return integrate_singular(g, 0.0, 1.0, zero, budget);
}

QuadratureResult combine(std::initializer_list<QuadratureResult> parts) {
    QuadratureResult out;
    ComplexSum s;
    for (const auto& p : parts) {
        s += p.value;
        out.error += p.error;
        out.evaluations += p.evaluations;
    }
    out.value = s.value();
    return out;
}

} // namespace

QuadratureResult integrate_to_infinity(const Integrand& f, double a,
                                       std::span<const double> singular_points,
                                       const QuadratureBudget& budget) {
    budget.validate();
    const double R = split_radius(a, singular_points, budget);
    QuadratureBudget part = budget;
    part.abs_tol = budget.abs_tol / 2;
    auto near = integrate_singular(f, a, R, singular_points, part);
    auto far = mapped_tail(f, R, 1.0, part);
    return combine({near, far});
}

QuadratureResult integrate_from_minus_infinity(const Integrand& f, double b,
                                               std::span<const double> singular_points,
                                               const QuadratureBudget& budget) {
    budget.validate();
    const double R = split_radius(b, singular_points, budget);
    QuadratureBudget part = budget;
    part.abs_tol = budget.abs_tol / 2;
    auto near = integrate_singular(f, -R, b, singular_points, part);
    auto far = mapped_tail(f, R, -1.0, part);
    return combine({far, near});
}

QuadratureResult integrate_line(const Integrand& f, std::span<const double> singular_points,
                                const QuadratureBudget& budget) {
    budget.validate();
    const double R = split_radius(0.0, singular_points, budget);
    QuadratureBudget part = budget;
    part.abs_tol = budget.abs_tol / 3;
    auto left = mapped_tail(f, R, -1.0, part);
    auto mid = integrate_singular(f, -R, R, singular_points, part);
    auto right = mapped_tail(f, R, 1.0, part);
    return combine({left, mid, right});
}

} // namespace rieszlab
