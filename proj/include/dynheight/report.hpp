#pragma once

// JSON and CSV encodings of the result records, plus schema checks used by
// consumers that re-read emitted reports.

#include <json.hpp>

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dynheight/complexdyn.hpp"
#include "dynheight/heights.hpp"
#include "dynheight/padic.hpp"
#include "dynheight/pairing.hpp"

namespace dynheight {

using Json = nlohmann::json;

inline Json to_json(const Certificate& c) {
    return {{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}};
}

inline Json certificates_json(const std::vector<Certificate>& certs) {
    Json arr = Json::array();
    for (const auto& c : certs) arr.push_back(to_json(c));
    return arr;
}

/// HeightReport schema: p, n, count, avg_height, bound, limit, max_residual,
/// elapsed_ms, plus bits and certificates.
inline Json to_json(const HeightReport& r, bool timing = true) {
    return {{"p", r.p},
            {"n", r.n},
            {"count", r.root_count},
            {"avg_height", r.avg_height},
            {"bound", r.uniform_bound},
            {"limit", r.limit},
            {"max_residual", r.max_residual},
            {"elapsed_ms", timing ? r.elapsed_ms : 0},
            {"bits", r.bits},
            {"certificates", certificates_json(r.certificates)}};
}

inline Json to_json(const PairingReport& r, bool timing = true) {
    Json params = Json::object();
    if (r.method == PairingMethod::pullback) {
        params["depth"] = r.depth;
        params["base_re"] = r.base_re;
        params["base_im"] = r.base_im;
    } else {
        params["samples"] = r.samples;
    }
    return {{"p", r.p},
            {"method", to_string(r.method)},
            {"estimate", r.estimate},
            {"target", r.target},
            {"abs_error", r.abs_error},
            {"parameters", params},
            {"bits", r.bits},
            {"elapsed_ms", timing ? r.elapsed_ms : 0},
            {"certificates", certificates_json(r.certificates)}};
}

inline Json to_json(const SplittingReport& r) {
    return {{"expected_count", r.expected_count},
            {"count", r.count},
            {"count_ok", r.count_ok},
            {"addresses_distinct", r.addresses_distinct},
            {"distinct", r.distinct},
            {"distinct_modulus_digits", r.distinct_modulus_digits},
            {"min_trusted_digits", r.min_trusted_digits},
            {"max_residual_deficit", r.max_residual_deficit},
            {"success", r.success}};
}

inline Json to_json(const GreenValue& g) {
    return {{"value", g.value.to_double()},
            {"value_digits", g.value.to_string(30)},
            {"status", to_string(g.status)},
            {"iterations", g.iterations_used},
            {"truncation_bound", g.truncation_bound}};
}

namespace detail {

inline bool has(const Json& j, const char* key, Json::value_t type) {
    if (!j.contains(key)) return false;
    const auto t = j.at(key).type();
    if (type == Json::value_t::number_float)
        return t == Json::value_t::number_float || t == Json::value_t::number_integer || t == Json::value_t::number_unsigned;
    if (type == Json::value_t::number_integer) return t == Json::value_t::number_integer || t == Json::value_t::number_unsigned;
    return t == type;
}

}  // namespace detail

/// True when j carries every HeightReport field with the documented type.
inline bool validate_height_report(const Json& j) {
    using V = Json::value_t;
    return j.is_object() && detail::has(j, "p", V::number_integer) && detail::has(j, "n", V::number_integer) &&
           detail::has(j, "count", V::number_integer) && detail::has(j, "avg_height", V::number_float) &&
           detail::has(j, "bound", V::number_float) && detail::has(j, "limit", V::number_float) &&
           detail::has(j, "max_residual", V::number_float) && detail::has(j, "elapsed_ms", V::number_integer);
}

inline bool validate_pairing_report(const Json& j) {
    using V = Json::value_t;
    if (!(j.is_object() && detail::has(j, "p", V::number_integer) && detail::has(j, "method", V::string) &&
          detail::has(j, "estimate", V::number_float) && detail::has(j, "target", V::number_float) &&
          detail::has(j, "abs_error", V::number_float) && detail::has(j, "parameters", V::object) &&
          detail::has(j, "elapsed_ms", V::number_integer)))
        return false;
    const auto& method = j.at("method").get_ref<const std::string&>();
    const auto& params = j.at("parameters");
    if (method == "pullback") return detail::has(params, "depth", V::number_integer);
    if (method == "decomposition") return detail::has(params, "samples", V::number_integer);
    return false;
}

inline std::string format_double(double x, int digits = 17) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

inline void write_height_csv(std::ostream& os, const std::vector<HeightReport>& reports) {
    os << "n,avg_height,bound,limit,abs_error\n";
    for (const auto& r : reports)
        os << r.n << ',' << format_double(r.avg_height) << ',' << format_double(r.uniform_bound) << ','
           << format_double(r.limit) << ',' << format_double(r.abs_error()) << '\n';
}

inline void write_padic_csv(std::ostream& os, const PadicOrbit& orbit) {
    os << "address,mantissa_base_p,effective_precision\n";
    for (const auto& leaf : orbit.leaves)
        os << address_string(leaf.address, orbit.p) << ',' << leaf.value.digits_string() << ',' << leaf.value.precision() << '\n';
}

inline void write_orbit_csv(std::ostream& os, const ComplexOrbit& orbit, int digits = 40) {
    os << "address,re,im,residual\n";
    for (const auto& leaf : orbit.leaves)
        os << address_string(leaf.address, orbit.p) << ',' << leaf.value.real().to_string(digits) << ','
           << leaf.value.imag().to_string(digits) << ',' << leaf.residual.to_string(6) << '\n';
}

}  // namespace dynheight
