#pragma once

// Tablet drawing records: CSV ingestion, augmentation, conversion to curves
// and a synthetic spiral fixture.
//
// CSV schema (header required, column order free):
//   timestamp,X,Y,Z,P,A,subject,class
// class is "control" or "patient" (case-insensitive) or 0/1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fdl/curve.hpp"
#include "fdl/errors.hpp"
#include "fdl/rng.hpp"

namespace fdl {

enum class DrawingClass { Control = 0, Patient = 1 };
enum class Channel { X, Y, Z, P, A };

inline const char* to_string(Channel c) {
    switch (c) {
        case Channel::X: return "X";
        case Channel::Y: return "Y";
        case Channel::Z: return "Z";
        case Channel::P: return "P";
        case Channel::A: return "A";
    }
    return "?";
}

inline Channel channel_from_string(const std::string& s) {
    for (Channel c : {Channel::X, Channel::Y, Channel::Z, Channel::P, Channel::A})
        if (s == to_string(c)) return c;
    throw ArgumentError("unknown drawing channel '" + s + "' (expected X, Y, Z, P or A)");
}

struct DrawingRecord {
    std::string subject;
    DrawingClass cls = DrawingClass::Control;
    std::vector<double> t, x, y, z, p, a;

    std::size_t size() const noexcept { return t.size(); }

    const std::vector<double>& channel(Channel c) const {
        switch (c) {
            case Channel::X: return x;
            case Channel::Y: return y;
            case Channel::Z: return z;
            case Channel::P: return p;
            case Channel::A: return a;
        }
        return x;
    }
    std::vector<double>& channel(Channel c) { return const_cast<std::vector<double>&>(std::as_const(*this).channel(c)); }

    void validate() const {
        const std::size_t n = t.size();
        for (Channel c : {Channel::X, Channel::Y, Channel::Z, Channel::P, Channel::A})
            if (channel(c).size() != n)
                throw DataError("drawing '" + subject + "': channel " + to_string(c) + " length differs from timestamps");
        for (std::size_t i = 1; i < n; ++i)
            if (!(t[i] > t[i - 1]))
                throw DataError("drawing '" + subject + "': timestamps not strictly increasing at sample " +
                                std::to_string(i));
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string& s, std::size_t row, const std::string& col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("row " + std::to_string(row) + ": column " + col + " is not a number ('" + s + "')");
    }
}

inline DrawingClass parse_class(std::string s, std::size_t row) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "control" || s == "0") return DrawingClass::Control;
    if (s == "patient" || s == "1") return DrawingClass::Patient;
    throw DataError("row " + std::to_string(row) + ": unknown class '" + s + "'");
}

}  // namespace detail

/// Parses the drawing CSV; records are grouped by subject in order of first
/// appearance.
inline std::vector<DrawingRecord> ingest_drawings(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("drawing CSV is empty");
    const auto header = detail::split_csv_line(line);
    static const std::array<const char*, 8> required{"timestamp", "X", "Y", "Z", "P", "A", "subject", "class"};
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* name : required)
        if (!col.count(name)) throw DataError(std::string("drawing CSV is missing column '") + name + "'");

    std::vector<DrawingRecord> records;
    std::map<std::string, std::size_t> by_subject;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() < header.size())
            throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(cells.size()));
        const std::string& subject = cells[col["subject"]];
        const DrawingClass cls = detail::parse_class(cells[col["class"]], row);
        auto [it, fresh] = by_subject.try_emplace(subject, records.size());
        if (fresh) {
            records.emplace_back();
            records.back().subject = subject;
            records.back().cls = cls;
        }
        DrawingRecord& rec = records[it->second];
        if (rec.cls != cls) throw DataError("row " + std::to_string(row) + ": subject '" + subject + "' changes class");
        const double t = detail::parse_number(cells[col["timestamp"]], row, "timestamp");
        if (!rec.t.empty() && !(t > rec.t.back()))
            throw DataError("row " + std::to_string(row) + ": non-monotone timestamp for subject '" + subject + "'");
        rec.t.push_back(t);
        rec.x.push_back(detail::parse_number(cells[col["X"]], row, "X"));
        rec.y.push_back(detail::parse_number(cells[col["Y"]], row, "Y"));
        rec.z.push_back(detail::parse_number(cells[col["Z"]], row, "Z"));
        rec.p.push_back(detail::parse_number(cells[col["P"]], row, "P"));
        rec.a.push_back(detail::parse_number(cells[col["A"]], row, "A"));
    }
    return records;
}

inline std::vector<DrawingRecord> ingest_drawings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open drawing CSV '" + path + "'");
    return ingest_drawings(in);
}

inline void write_drawings_csv(std::ostream& out, const std::vector<DrawingRecord>& records) {
    out << "timestamp,X,Y,Z,P,A,subject,class\n";
    out.precision(17);
    for (const auto& r : records)
        for (std::size_t i = 0; i < r.size(); ++i)
            out << r.t[i] << ',' << r.x[i] << ',' << r.y[i] << ',' << r.z[i] << ',' << r.p[i] << ',' << r.a[i] << ','
                << r.subject << ',' << (r.cls == DrawingClass::Control ? "control" : "patient") << '\n';
}

/// Uniform shift ranges per channel; reflect flips X and Y independently
/// (probability 1/2 each) about their means.
struct AugmentSpec {
    std::array<double, 2> x_shift{-25.0, 25.0};
    std::array<double, 2> y_shift{-50.0, 50.0};
    std::array<double, 2> z_shift{-0.5, 0.5};
    std::array<double, 2> p_shift{0.0, 50.0};
    std::array<double, 2> a_shift{0.0, 25.0};
    bool reflect = true;

    static AugmentSpec identity() { return {{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, false}; }

    void validate() const {
        for (const auto& r : {x_shift, y_shift, z_shift, p_shift, a_shift})
            if (!(r[0] <= r[1]) || !std::isfinite(r[0]) || !std::isfinite(r[1]))
                throw ArgumentError("augment: shift range must be finite with lo <= hi");
    }
};

inline DrawingRecord augment_drawing(const DrawingRecord& rec, const AugmentSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    DrawingRecord out = rec;
    const std::array<std::pair<Channel, std::array<double, 2>>, 5> shifts{
        {{Channel::X, spec.x_shift}, {Channel::Y, spec.y_shift}, {Channel::Z, spec.z_shift},
         {Channel::P, spec.p_shift}, {Channel::A, spec.a_shift}}};
    for (const auto& [ch, range] : shifts) {
        const double d = range[0] == range[1] ? range[0] : rng.uniform(range[0], range[1]);
        for (double& v : out.channel(ch)) v += d;
    }
    if (spec.reflect) {
        for (Channel ch : {Channel::X, Channel::Y}) {
            if (rng.uniform() >= 0.5) continue;
            auto& v = out.channel(ch);
            if (v.empty()) continue;
            double m = 0.0;
            for (double e : v) m += e;
            m /= static_cast<double>(v.size());
            for (double& e : v) e = 2.0 * m - e;
        }
    }
    return out;
}

/// Augmented copies: control records get 4x the copies of patient records.
inline std::size_t augmentation_copies(DrawingClass cls, std::size_t base) {
    return cls == DrawingClass::Control ? 4 * base : base;
}

inline std::vector<DrawingRecord> augment_corpus(const std::vector<DrawingRecord>& records, const AugmentSpec& spec,
                                                 std::size_t base_copies, std::uint64_t seed) {
    std::vector<DrawingRecord> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::size_t copies = augmentation_copies(records[i].cls, base_copies);
        for (std::size_t k = 0; k < copies; ++k) {
            out.push_back(augment_drawing(records[i], spec, mix_seed(mix_seed(seed, i), k)));
            out.back().subject = records[i].subject + "#" + std::to_string(k);
        }
    }
    return out;
}

/// One curve per selected channel. Samples are treated as equidistant in
/// time between the first and last timestamp.
inline std::vector<Curve> drawings_to_curves(const DrawingRecord& rec, const std::vector<Channel>& channels) {
    if (channels.empty()) throw ArgumentError("drawings_to_curves: no channels selected");
    rec.validate();
    if (rec.size() < 2) throw DataError("drawing '" + rec.subject + "' has fewer than 2 samples");
    std::vector<Curve> out;
    for (Channel ch : channels) {
        CurveMeta meta;
        meta.family = Family::Drawing;
        meta.labels = {{"class", static_cast<double>(rec.cls)}};
        out.push_back(Curve::on_grid(rec.t.front(), rec.t.back(), rec.channel(ch), std::move(meta)));
    }
    return out;
}

/// Archimedean spiral r = k*theta over `turns` turns. Patient drawings carry
/// a slow radial wobble (2-4 cycles per drawing, 25-35% of r), uneven pen
/// speed and weaker, more variable pressure.
inline DrawingRecord synthetic_spiral(const std::string& subject, DrawingClass cls, std::uint64_t seed,
                                      std::size_t samples = 1000, double turns = 3.0) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Rng rng(seed);
    DrawingRecord rec;
    rec.subject = subject;
    rec.cls = cls;
    const double k = rng.uniform(8.0, 12.0);
    const double phase = rng.uniform(0.0, two_pi);
    const double cx = rng.uniform(200.0, 300.0), cy = rng.uniform(200.0, 300.0);
    const bool patient = cls == DrawingClass::Patient;
    const double wobble_amp = patient ? rng.uniform(0.25, 0.35) : 0.0;
    const double wobble_cycles = patient ? rng.uniform(2.0, 4.0) : 0.0;
    const double wobble_phase = rng.uniform(0.0, two_pi);
    const double hesitation = patient ? rng.uniform(0.02, 0.04) : 0.0;
    const double theta_max = two_pi * turns;
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(samples - 1);
        const double theta = theta_max * (s + hesitation * std::sin(two_pi * 3.0 * s));
        const double r = k * theta * (1.0 + wobble_amp * std::sin(two_pi * wobble_cycles * s + wobble_phase));
        rec.t.push_back(10.0 * static_cast<double>(i));
        rec.x.push_back(cx + r * std::cos(theta + phase));
        rec.y.push_back(cy + r * std::sin(theta + phase));
        rec.z.push_back(rng.uniform(0.0, 0.05));
        rec.p.push_back((patient ? 400.0 : 600.0) + (patient ? 80.0 : 20.0) * rng.normal());
        rec.a.push_back(45.0 + 2.0 * rng.normal());
    }
    return rec;
}

/// Fixture of n_control control and n_patient patient spirals. With the 4x
/// control augmentation, n_patient = 4 * n_control gives balanced classes.
inline std::vector<DrawingRecord> synthetic_spiral_corpus(std::size_t n_control, std::size_t n_patient,
                                                          std::uint64_t seed, std::size_t samples = 1000) {
    std::vector<DrawingRecord> out;
    for (std::size_t i = 0; i < n_control; ++i)
        out.push_back(synthetic_spiral("C" + std::to_string(i), DrawingClass::Control, mix_seed(seed, i), samples));
    for (std::size_t i = 0; i < n_patient; ++i)
        out.push_back(synthetic_spiral("P" + std::to_string(i), DrawingClass::Patient,
                                       mix_seed(seed, n_control + i), samples));
    return out;
}

}  // namespace fdl
