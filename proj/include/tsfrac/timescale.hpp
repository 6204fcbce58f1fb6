#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "tsfrac/detail/text.hpp"
#include "tsfrac/error.hpp"

namespace tsfrac {

/// A point counts as in-scale if it lies within this absolute distance of a
/// represented point, or inside a continuous segment.
inline constexpr double membership_tolerance = 1e-12;

struct FiniteSet {
    std::vector<double> values;
};

/// start, start + step, ..., start + (count - 1) * step
struct UniformLattice {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 1;
};

/// base^k for k = first_exponent .. last_exponent
struct GeometricLattice {
    double base = 2.0;
    long first_exponent = 0;
    long last_exponent = 0;
};

struct ContinuousInterval {
    double lo = 0.0;
    double hi = 1.0;
};

using Segment = std::variant<FiniteSet, UniformLattice, GeometricLattice, ContinuousInterval>;

enum class Side { scattered, dense };

struct PointClass {
    Side right = Side::dense;
    Side left = Side::dense;
    bool is_max = false;
    bool is_min = false;

    friend bool operator==(const PointClass&, const PointClass&) = default;
};

inline std::string_view to_string(Side side) { return side == Side::scattered ? "scattered" : "dense"; }

struct ScatteredPoint {
    double point;
    double weight; ///< min(mu(point), b - point)
};

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

/// The [a, b) part of a scale split into right-scattered points and
/// continuous pieces. Weights plus piece lengths sum to b - a.
struct ScatteredDecomposition {
    std::vector<ScatteredPoint> scattered;
    std::vector<Interval> continuous;
};

/// Bounded closed subset of the reals built from finitely many segments.
/// Immutable after construction. The constructor normalizes its input:
/// overlapping continuous intervals are merged, discrete points covered by a
/// continuous interval are dropped, and interleaved discrete segments are
/// merged into one finite set.
class TimeScale {
public:
    explicit TimeScale(std::vector<Segment> segments);
    explicit TimeScale(Segment segment) : TimeScale(std::vector<Segment>{std::move(segment)}) {}

    /// Parses the scale mini-language:
    /// `Z:a..b`, `h:step:a..b`, `q:ratio:k0..k1`, `set:{v1,...}`, `R:a..b`,
    /// and `union(S1;S2;...)`.
    static TimeScale parse(std::string_view text);

    double min() const { return pieces_.front().lo; }
    double max() const { return pieces_.back().hi; }

    bool contains(double t) const { return find(t).has_value(); }
    bool has_continuous_part() const;

    /// Canonical representative of t (the exact stored point when t is
    /// within tolerance of a discrete point).
    double snap(double t) const { return locate(t).value; }

    double sigma(double t) const;
    double rho(double t) const;
    double mu(double t) const;
    PointClass classify(double t) const;

    /// Smallest scale point >= x, if any. x need not be in the scale.
    std::optional<double> ceil_point(double x) const;
    /// Largest scale point <= x, if any.
    std::optional<double> floor_point(double x) const;

    ScatteredDecomposition iterate_scattered(double a, double b) const;

    /// The continuous segment containing t, if t lies in one.
    std::optional<Interval> dense_interval(double t) const;

    /// Normalized segments, sorted ascending.
    std::vector<Segment> segments() const;
    std::string to_string() const;

private:
    struct Piece {
        Segment source;
        std::vector<double> points; // empty for continuous pieces
        double lo;
        double hi;
        bool continuous() const { return std::holds_alternative<ContinuousInterval>(source); }
    };

    struct Position {
        std::size_t piece;
        std::size_t index; // point index for discrete pieces
        double value;
    };

    std::optional<Position> find(double t) const;
    Position locate(double t) const;
    double next_after(const Position& pos) const;
    double prev_before(const Position& pos) const;

    std::vector<Piece> pieces_;
};

namespace detail {

inline void require_finite(double v, const char* what)
{
    if (!std::isfinite(v)) throw error(errc::invalid_scale, std::string(what) + " must be finite");
}

inline std::vector<double> materialize(const Segment& segment)
{
    return std::visit(
        [](const auto& s) -> std::vector<double> {
            using S = std::decay_t<decltype(s)>;
            std::vector<double> pts;
            if constexpr (std::is_same_v<S, FiniteSet>) {
                if (s.values.empty()) throw error(errc::invalid_scale, "finite set is empty");
                pts = s.values;
                for (double v : pts) require_finite(v, "set value");
                std::sort(pts.begin(), pts.end());
                for (std::size_t i = 1; i < pts.size(); ++i)
                    if (pts[i] - pts[i - 1] <= membership_tolerance)
                        throw error(errc::invalid_scale, "set values must be distinct");
            } else if constexpr (std::is_same_v<S, UniformLattice>) {
                require_finite(s.start, "lattice start");
                require_finite(s.step, "lattice step");
                if (!(s.step > 0.0)) throw error(errc::invalid_scale, "lattice step must be positive");
                if (s.count == 0) throw error(errc::invalid_scale, "lattice must have at least one point");
                pts.reserve(s.count);
                for (std::size_t i = 0; i < s.count; ++i) pts.push_back(s.start + static_cast<double>(i) * s.step);
            } else if constexpr (std::is_same_v<S, GeometricLattice>) {
                require_finite(s.base, "lattice ratio");
                if (!(s.base > 1.0)) throw error(errc::invalid_scale, "geometric ratio must exceed 1");
                if (s.first_exponent > s.last_exponent)
                    throw error(errc::invalid_scale, "geometric exponents must satisfy k0 <= k1");
                for (long k = s.first_exponent; k <= s.last_exponent; ++k) {
                    double v = std::pow(s.base, static_cast<double>(k));
                    require_finite(v, "geometric lattice point");
                    pts.push_back(v);
                }
            } else {
                require_finite(s.lo, "interval bound");
                require_finite(s.hi, "interval bound");
                if (!(s.lo < s.hi)) throw error(errc::invalid_scale, "continuous interval needs lo < hi");
            }
            return pts;
        },
        segment);
}

inline std::string segment_text(const Segment& segment)
{
    return std::visit(
        [](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, FiniteSet>) {
                std::string out = "set:{";
                for (std::size_t i = 0; i < s.values.size(); ++i) {
                    if (i) out += ',';
                    out += format_number(s.values[i]);
                }
                return out + "}";
            } else if constexpr (std::is_same_v<S, UniformLattice>) {
                double last = s.start + static_cast<double>(s.count - 1) * s.step;
                if (s.step == 1.0 && std::floor(s.start) == s.start)
                    return "Z:" + format_number(s.start) + ".." + format_number(last);
                return "h:" + format_number(s.step) + ":" + format_number(s.start) + ".." + format_number(last);
            } else if constexpr (std::is_same_v<S, GeometricLattice>) {
                return "q:" + format_number(s.base) + ":" + std::to_string(s.first_exponent) + ".." +
                       std::to_string(s.last_exponent);
            } else {
                return "R:" + format_number(s.lo) + ".." + format_number(s.hi);
            }
        },
        segment);
}

inline long expect_integer(Cursor& cur)
{
    std::size_t at = cur.offset();
    double v = cur.expect_number();
    if (std::floor(v) != v || std::abs(v) > 1e15) cur.fail_at("expected an integer", at);
    return static_cast<long>(v);
}

inline void parse_scale_into(Cursor& cur, std::vector<Segment>& out)
{
    if (cur.consume("union")) {
        cur.expect('(');
        parse_scale_into(cur, out);
        while (cur.consume(';')) parse_scale_into(cur, out);
        cur.expect(')');
        return;
    }
    std::size_t at = cur.offset();
    std::string_view kind = cur.identifier();
    if (kind.empty()) cur.fail("expected a scale kind");
    cur.expect(':');
    if (kind == "Z") {
        long a = expect_integer(cur);
        cur.expect("..");
        long b = expect_integer(cur);
        if (a > b) throw error(errc::invalid_scale, "Z:a..b needs a <= b");
        out.emplace_back(UniformLattice{static_cast<double>(a), 1.0, static_cast<std::size_t>(b - a) + 1});
    } else if (kind == "h") {
        double step = cur.expect_number();
        cur.expect(':');
        double a = cur.expect_number();
        cur.expect("..");
        double b = cur.expect_number();
        if (!(step > 0.0)) throw error(errc::invalid_scale, "lattice step must be positive");
        if (a > b) throw error(errc::invalid_scale, "h:step:a..b needs a <= b");
        double n = std::round((b - a) / step);
        if (std::abs(a + n * step - b) > 1e-9 * std::max(1.0, std::abs(b)))
            throw error(errc::invalid_scale, "upper bound is not on the lattice");
        out.emplace_back(UniformLattice{a, step, static_cast<std::size_t>(n) + 1});
    } else if (kind == "q") {
        double ratio = cur.expect_number();
        cur.expect(':');
        long k0 = expect_integer(cur);
        cur.expect("..");
        long k1 = expect_integer(cur);
        out.emplace_back(GeometricLattice{ratio, k0, k1});
    } else if (kind == "set") {
        cur.expect('{');
        FiniteSet set;
        set.values.push_back(cur.expect_number());
        while (cur.consume(',')) set.values.push_back(cur.expect_number());
        cur.expect('}');
        out.emplace_back(std::move(set));
    } else if (kind == "R") {
        double a = cur.expect_number();
        cur.expect("..");
        double b = cur.expect_number();
        out.emplace_back(ContinuousInterval{a, b});
    } else {
        cur.fail_at("unknown scale kind '" + std::string(kind) + "'", at);
    }
}

} // namespace detail

inline TimeScale::TimeScale(std::vector<Segment> segments)
{
    if (segments.empty()) throw error(errc::invalid_scale, "a time scale needs at least one segment");

    std::vector<Interval> intervals;
    std::vector<Piece> discrete;
    for (auto& segment : segments) {
        auto pts = detail::materialize(segment);
        if (auto* c = std::get_if<ContinuousInterval>(&segment)) {
            intervals.push_back({c->lo, c->hi});
        } else {
            double lo = pts.front(), hi = pts.back();
            discrete.push_back(Piece{std::move(segment), std::move(pts), lo, hi});
        }
    }

    std::sort(intervals.begin(), intervals.end(), [](auto& x, auto& y) { return x.lo < y.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.lo <= merged.back().hi + membership_tolerance)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }

    auto covering_interval = [&](double p) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < merged.size(); ++i)
            if (p >= merged[i].lo - membership_tolerance && p <= merged[i].hi + membership_tolerance)
                return static_cast<std::ptrdiff_t>(i);
        return -1;
    };
    auto gap_index = [&](double p) {
        return std::upper_bound(merged.begin(), merged.end(), p, [](double v, const Interval& iv) { return v < iv.lo; }) -
               merged.begin();
    };

    // Split discrete segments into runs lying strictly between continuous intervals.
    std::vector<Piece> runs;
    for (auto& piece : discrete) {
        std::vector<std::vector<double>> split;
        std::ptrdiff_t last_gap = -1;
        bool modified = false;
        for (double p : piece.points) {
            if (covering_interval(p) >= 0) {
                modified = true;
                continue;
            }
            auto gap = gap_index(p);
            if (split.empty() || gap != last_gap) split.emplace_back();
            split.back().push_back(p);
            last_gap = gap;
        }
        if (split.size() == 1 && !modified) {
            runs.push_back(std::move(piece));
            continue;
        }
        for (auto& run : split) {
            double lo = run.front(), hi = run.back();
            runs.push_back(Piece{FiniteSet{run}, std::move(run), lo, hi});
        }
    }

    std::sort(runs.begin(), runs.end(), [](auto& x, auto& y) { return x.lo < y.lo; });
    std::vector<Piece> merged_runs;
    for (auto& run : runs) {
        if (!merged_runs.empty() && run.lo <= merged_runs.back().hi + membership_tolerance) {
            auto& into = merged_runs.back();
            std::vector<double> pts;
            std::merge(into.points.begin(), into.points.end(), run.points.begin(), run.points.end(),
                       std::back_inserter(pts));
            std::vector<double> unique;
            for (double p : pts)
                if (unique.empty() || p - unique.back() > membership_tolerance) unique.push_back(p);
            into = Piece{FiniteSet{unique}, unique, unique.front(), unique.back()};
        } else {
            merged_runs.push_back(std::move(run));
        }
    }

    for (const auto& iv : merged) pieces_.push_back(Piece{ContinuousInterval{iv.lo, iv.hi}, {}, iv.lo, iv.hi});
    for (auto& run : merged_runs) pieces_.push_back(std::move(run));
    std::sort(pieces_.begin(), pieces_.end(), [](auto& x, auto& y) { return x.lo < y.lo; });
    for (std::size_t i = 1; i < pieces_.size(); ++i)
        if (!(pieces_[i].lo > pieces_[i - 1].hi + membership_tolerance))
            throw error(errc::invalid_scale, "segments overlap after normalization");
}

inline TimeScale TimeScale::parse(std::string_view text)
{
    detail::Cursor cur(text);
    std::vector<Segment> segments;
    detail::parse_scale_into(cur, segments);
    if (!cur.at_end()) cur.fail("trailing characters");
    return TimeScale(std::move(segments));
}

inline bool TimeScale::has_continuous_part() const
{
    return std::any_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.continuous(); });
}

inline std::optional<TimeScale::Position> TimeScale::find(double t) const
{
    if (!std::isfinite(t)) return std::nullopt;
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), t,
                               [](const Piece& p, double v) { return p.hi + membership_tolerance < v; });
    if (it == pieces_.end() || t < it->lo - membership_tolerance) return std::nullopt;
    std::size_t piece = static_cast<std::size_t>(it - pieces_.begin());
    if (it->continuous()) {
        double v = std::clamp(t, it->lo, it->hi);
        if (std::abs(v - it->lo) <= membership_tolerance) v = it->lo;
        if (std::abs(v - it->hi) <= membership_tolerance) v = it->hi;
        return Position{piece, 0, v};
    }
    const auto& pts = it->points;
    auto p = std::lower_bound(pts.begin(), pts.end(), t - membership_tolerance);
    if (p == pts.end() || std::abs(*p - t) > membership_tolerance) return std::nullopt;
    return Position{piece, static_cast<std::size_t>(p - pts.begin()), *p};
}

inline TimeScale::Position TimeScale::locate(double t) const
{
    auto pos = find(t);
    if (!pos) throw error(errc::point_not_in_scale, detail::format_number(t) + " is not in " + to_string());
    return *pos;
}

inline double TimeScale::next_after(const Position& pos) const
{
    const Piece& piece = pieces_[pos.piece];
    if (piece.continuous()) {
        if (pos.value < piece.hi) return pos.value;
    } else if (pos.index + 1 < piece.points.size()) {
        return piece.points[pos.index + 1];
    }
    if (pos.piece + 1 < pieces_.size()) return pieces_[pos.piece + 1].lo;
    return pos.value;
}

inline double TimeScale::prev_before(const Position& pos) const
{
    const Piece& piece = pieces_[pos.piece];
    if (piece.continuous()) {
        if (pos.value > piece.lo) return pos.value;
    } else if (pos.index > 0) {
        return piece.points[pos.index - 1];
    }
    if (pos.piece > 0) return pieces_[pos.piece - 1].hi;
    return pos.value;
}

inline double TimeScale::sigma(double t) const { return next_after(locate(t)); }

inline double TimeScale::rho(double t) const { return prev_before(locate(t)); }

inline double TimeScale::mu(double t) const
{
    auto pos = locate(t);
    return next_after(pos) - pos.value;
}

inline PointClass TimeScale::classify(double t) const
{
    auto pos = locate(t);
    PointClass pc;
    pc.right = next_after(pos) > pos.value ? Side::scattered : Side::dense;
    pc.left = prev_before(pos) < pos.value ? Side::scattered : Side::dense;
    pc.is_max = pos.value == max();
    pc.is_min = pos.value == min();
    return pc;
}

inline std::optional<double> TimeScale::ceil_point(double x) const
{
    if (auto pos = find(x)) return pos->value;
    for (const auto& piece : pieces_) {
        if (piece.hi < x) continue;
        if (piece.continuous()) return std::max(x, piece.lo);
        return *std::lower_bound(piece.points.begin(), piece.points.end(), x);
    }
    return std::nullopt;
}

inline std::optional<double> TimeScale::floor_point(double x) const
{
    if (auto pos = find(x)) return pos->value;
    for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
        if (it->lo > x) continue;
        if (it->continuous()) return std::min(x, it->hi);
        return *(std::upper_bound(it->points.begin(), it->points.end(), x) - 1);
    }
    return std::nullopt;
}

inline ScatteredDecomposition TimeScale::iterate_scattered(double a, double b) const
{
    auto pa = locate(a);
    auto pb = locate(b);
    if (pa.value > pb.value)
        throw error(errc::empty_range, "a = " + detail::format_number(a) + " exceeds b = " + detail::format_number(b));
    const double lo = pa.value, hi = pb.value;

    ScatteredDecomposition out;
    for (std::size_t i = pa.piece; i <= pb.piece && i < pieces_.size(); ++i) {
        const Piece& piece = pieces_[i];
        if (piece.continuous()) {
            double from = std::max(piece.lo, lo), to = std::min(piece.hi, hi);
            if (to > from) out.continuous.push_back({from, to});
            if (piece.hi >= lo && piece.hi < hi) {
                double mu = pieces_[i + 1].lo - piece.hi;
                out.scattered.push_back({piece.hi, std::min(mu, hi - piece.hi)});
            }
            continue;
        }
        const auto& pts = piece.points;
        std::size_t first = i == pa.piece ? pa.index : 0;
        for (std::size_t k = first; k < pts.size() && pts[k] < hi; ++k) {
            double next = k + 1 < pts.size() ? pts[k + 1] : pieces_[i + 1].lo;
            out.scattered.push_back({pts[k], std::min(next - pts[k], hi - pts[k])});
        }
    }
    return out;
}

inline std::optional<Interval> TimeScale::dense_interval(double t) const
{
    auto pos = locate(t);
    const Piece& piece = pieces_[pos.piece];
    if (!piece.continuous()) return std::nullopt;
    return Interval{piece.lo, piece.hi};
}

inline std::vector<Segment> TimeScale::segments() const
{
    std::vector<Segment> out;
    out.reserve(pieces_.size());
    for (const auto& piece : pieces_) out.push_back(piece.source);
    return out;
}

inline std::string TimeScale::to_string() const
{
    if (pieces_.size() == 1) return detail::segment_text(pieces_.front().source);
    std::string out = "union(";
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (i) out += ';';
        out += detail::segment_text(pieces_[i].source);
    }
    return out + ")";
}

} // namespace tsfrac
