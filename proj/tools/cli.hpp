#pragma once

// Command-line front end. Every subcommand writes a machine-readable report
// to standard output (or --output) and diagnostics to standard error.
//
// Exit status: 0 success, 2 invalid input or cap exceeded, 3 numerical or
// precision failure (including a failed splitting verification).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dynheight/dynheight.hpp"
#include "dynheight/report.hpp"

namespace dynheight::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kBitsEnv = "DYNHEIGHT_BITS";

enum class Format { json, csv, table };

struct RunConfig {
    std::string subcommand;
    std::uint64_t p = 2;
    unsigned n = 1;
    unsigned n_max = 1;
    unsigned bits = kDefaultBits;
    std::optional<unsigned> digits;  // p-adic K; default 64 + n
    std::string base_re = "41/100";
    std::string base_im = "37/100";
    std::string re = "0";
    std::string im = "0";
    std::size_t samples = 64;
    std::string method = "decomposition";
    Format format = Format::json;
    std::string output;
    bool no_timing = false;
    unsigned threads = 0;
    std::size_t orbit_cap = std::size_t{1} << 16;
    std::size_t degree_cap = std::size_t{1} << 16;
    std::size_t coefficient_bits_cap = std::size_t{1} << 26;
};

inline const char* to_string(Format f) {
    switch (f) {
        case Format::json: return "json";
        case Format::csv: return "csv";
        case Format::table: return "table";
    }
    return "json";
}

/// Default mantissa width, overridable through DYNHEIGHT_BITS.
inline unsigned default_bits() {
    if (const char* env = std::getenv(kBitsEnv)) {
        try {
            unsigned long v = std::stoul(env);
            if (v >= kMinMantissaBits && v <= (1u << 16)) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid " << kBitsEnv << "=" << env << "\n";
    }
    return kDefaultBits;
}

inline Json config_json(const RunConfig& c) {
    Json j = {{"subcommand", c.subcommand}, {"p", c.p}, {"bits", c.bits}, {"format", to_string(c.format)}, {"threads", c.threads}};
    if (c.subcommand == "heights") j["n_max"] = c.n_max;
    if (c.subcommand == "padic" || c.subcommand == "orbit" || c.subcommand == "model") j["n"] = c.n;
    if (c.subcommand == "padic") j["digits"] = c.digits.value_or(64 + c.n);
    if (c.subcommand == "orbit") {
        j["base_re"] = c.base_re;
        j["base_im"] = c.base_im;
    }
    if (c.subcommand == "green") {
        j["re"] = c.re;
        j["im"] = c.im;
    }
    if (c.subcommand == "pairing") {
        j["method"] = c.method;
        if (c.method == "pullback") {
            j["n"] = c.n;
            j["base_re"] = c.base_re;
            j["base_im"] = c.base_im;
        } else {
            j["samples"] = c.samples;
        }
    }
    j["orbit_cap"] = c.orbit_cap;
    return j;
}

inline void validate(const RunConfig& c) {
    require_prime(c.p);
    if (c.p > 31) throw InvalidParameter("p must be at most 31");
    if (c.bits < kMinMantissaBits || c.bits > (1u << 16)) throw InvalidParameter("--bits must be in [53, 65536]");
    if (c.subcommand == "heights" && c.n_max == 0) throw InvalidParameter("--n-max must be positive");
    if ((c.subcommand == "padic" || c.subcommand == "orbit" || c.subcommand == "model" ||
         (c.subcommand == "pairing" && c.method == "pullback")) &&
        c.n == 0)
        throw InvalidParameter("--n must be positive");
    if (c.subcommand == "pairing" && c.method != "pullback" && c.method != "decomposition")
        throw InvalidParameter("--method must be pullback or decomposition");
    if (c.samples == 0) throw InvalidParameter("--samples must be positive");
}

namespace detail {

inline ComplexOrbitOptions orbit_options(const RunConfig& c) {
    ComplexOrbitOptions o;
    o.bits = c.bits;
    o.orbit_cap = c.orbit_cap;
    o.threads = c.threads;
    return o;
}

inline GreenOptions green_options(const RunConfig& c) {
    GreenOptions g;
    g.bits = c.bits;
    return g;
}

inline void dump(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

inline int run_heights(const RunConfig& c, std::ostream& out) {
    HeightOptions opt;
    opt.orbit = orbit_options(c);
    auto reports = height_sequence(c.p, c.n_max, opt);
    if (c.no_timing)
        for (auto& r : reports) r.elapsed_ms = 0;
    switch (c.format) {
        case Format::csv: write_height_csv(out, reports); break;
        case Format::table:
            out << "p = " << c.p << "  bound = " << format_double(reports.front().uniform_bound, 10)
                << "  limit = " << format_double(reports.front().limit, 10) << '\n';
            out << std::setw(4) << "n" << std::setw(14) << "roots" << std::setw(22) << "avg_height" << std::setw(22) << "abs_error" << '\n';
            for (const auto& r : reports)
                out << std::setw(4) << r.n << std::setw(14) << r.root_count << std::setw(22) << format_double(r.avg_height, 15)
                    << std::setw(22) << format_double(r.abs_error(), 6) << '\n';
            break;
        case Format::json: {
            Json arr = Json::array();
            for (const auto& r : reports) arr.push_back(to_json(r, !c.no_timing));
            dump(out, {{"config", config_json(c)}, {"reports", arr}});
            break;
        }
    }
    for (const auto& r : reports)
        for (const auto& cert : r.certificates)
            if (cert.status == CertificateStatus::failed) return kExitNumerical;
    return kExitOk;
}

inline int run_padic(const RunConfig& c, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    PadicOrbitOptions opt;
    opt.orbit_cap = c.orbit_cap;
    opt.threads = c.threads;
    PadicOrbit orbit = backward_orbit_padic(c.p, c.n, c.digits.value_or(64 + c.n), opt);
    SplittingReport r = verify_total_splitting(orbit);
    const auto ms = c.no_timing ? 0 : std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    switch (c.format) {
        case Format::csv: write_padic_csv(out, orbit); break;
        case Format::table:
            out << "leaves " << r.count << " of " << r.expected_count << ", distinct mod p^" << r.distinct_modulus_digits << ": "
                << (r.distinct ? "yes" : "no") << ", trusted digits after phi^n: " << r.min_trusted_digits
                << ", residual deficit: " << r.max_residual_deficit << ", " << (r.success ? "totally split" : "FAILED") << '\n';
            break;
        case Format::json: {
            Json j = to_json(r);
            j["config"] = config_json(c);
            j["p"] = c.p;
            j["n"] = c.n;
            j["digits"] = orbit.digits;
            j["elapsed_ms"] = ms;
            dump(out, j);
            break;
        }
    }
    return r.success ? kExitOk : kExitNumerical;
}

inline BigComplex parse_point(const std::string& re, const std::string& im, unsigned bits) {
    return {parse_rational(re), parse_rational(im), bits};
}

inline int run_orbit(const RunConfig& c, std::ostream& out) {
    ComplexOrbit orbit = backward_orbit_complex(c.p, c.n, parse_point(c.base_re, c.base_im, c.bits), orbit_options(c));
    const int digits = static_cast<int>(c.bits * 0.30103);
    switch (c.format) {
        case Format::json: {
            Json leaves = Json::array();
            for (const auto& leaf : orbit.leaves)
                leaves.push_back({{"address", address_string(leaf.address, orbit.p)},
                                  {"re", leaf.value.real().to_string(digits)},
                                  {"im", leaf.value.imag().to_string(digits)},
                                  {"residual", leaf.residual.to_double()}});
            dump(out, {{"config", config_json(c)},
                       {"p", c.p},
                       {"n", c.n},
                       {"count", orbit.leaves.size()},
                       {"bits", orbit.bits},
                       {"max_residual", orbit.max_residual.to_double()},
                       {"leaves", leaves}});
            break;
        }
        case Format::csv:
        case Format::table: write_orbit_csv(out, orbit, digits); break;
    }
    return kExitOk;
}

inline int run_green(const RunConfig& c, std::ostream& out) {
    GreenValue g = green_function(parse_point(c.re, c.im, c.bits), c.p, green_options(c));
    switch (c.format) {
        case Format::json: {
            Json j = to_json(g);
            j["config"] = config_json(c);
            j["p"] = c.p;
            j["re"] = c.re;
            j["im"] = c.im;
            j["in_filled_julia"] = g.status == GreenStatus::bounded_certified;
            dump(out, j);
            break;
        }
        case Format::csv:
            out << "re,im,value,status\n" << c.re << ',' << c.im << ',' << g.value.to_string(30) << ',' << to_string(g.status) << '\n';
            break;
        case Format::table:
            out << "G(" << c.re << " + " << c.im << "i) = " << g.value.to_string(30) << "  [" << to_string(g.status) << ", "
                << g.iterations_used << " iterations]\n";
            break;
    }
    return kExitOk;
}

inline int run_pairing(const RunConfig& c, std::ostream& out) {
    PairingOptions opt;
    opt.orbit = orbit_options(c);
    opt.green = green_options(c);
    PairingReport r = c.method == "pullback"
                          ? az_pullback_estimate(c.p, c.n, parse_rational(c.base_re), parse_rational(c.base_im), opt)
                          : az_decomposition_estimate(c.p, c.samples, opt);
    if (c.no_timing) r.elapsed_ms = 0;
    switch (c.format) {
        case Format::json: {
            Json j = to_json(r, !c.no_timing);
            j["config"] = config_json(c);
            dump(out, j);
            break;
        }
        case Format::csv:
            out << "method,p,estimate,target,abs_error\n"
                << to_string(r.method) << ',' << r.p << ',' << format_double(r.estimate) << ',' << format_double(r.target) << ','
                << format_double(r.abs_error) << '\n';
            break;
        case Format::table:
            out << "<sigma, phi_" << r.p << "> ~ " << format_double(r.estimate, 15) << " (" << to_string(r.method)
                << "), target " << format_double(r.target, 15) << ", error " << format_double(r.abs_error, 3) << '\n';
            for (const auto& cert : r.certificates) out << "  " << cert.name << ": " << to_string(cert.status) << " - " << cert.detail << '\n';
            break;
    }
    for (const auto& cert : r.certificates)
        if (cert.status == CertificateStatus::failed) return kExitNumerical;
    return kExitOk;
}

inline int run_model(const RunConfig& c, std::ostream& out) {
    PolyCaps caps{c.degree_cap, c.coefficient_bits_cap};
    IntPoly f = integral_model(c.p, c.n, caps);
    const auto& coeffs = f.coefficients();
    switch (c.format) {
        case Format::json: {
            bool small = true;
            for (const auto& x : coeffs) small = small && x.fits_slong_p();
            Json arr = Json::array();
            for (const auto& x : coeffs) {
                if (small)
                    arr.push_back(x.get_si());
                else
                    arr.push_back(x.get_str());
            }
            dump(out, {{"config", config_json(c)},
                       {"p", c.p},
                       {"n", c.n},
                       {"degree", f.degree()},
                       {"coefficient_encoding", small ? "integer" : "decimal-string"},
                       {"coefficients", arr}});
            break;
        }
        case Format::csv:
            out << "degree,coefficient\n";
            for (std::size_t i = 0; i < coeffs.size(); ++i) out << i << ',' << coeffs[i].get_str() << '\n';
            break;
        case Format::table:
            out << '[';
            for (std::size_t i = 0; i < coeffs.size(); ++i) out << (i ? ", " : "") << coeffs[i].get_str();
            out << "]\n";
            break;
    }
    return kExitOk;
}

}  // namespace detail

/// Executes one validated configuration.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        validate(c);
        if (c.subcommand == "heights") return detail::run_heights(c, out);
        if (c.subcommand == "padic") return detail::run_padic(c, out);
        if (c.subcommand == "orbit") return detail::run_orbit(c, out);
        if (c.subcommand == "green") return detail::run_green(c, out);
        if (c.subcommand == "pairing") return detail::run_pairing(c, out);
        if (c.subcommand == "model") return detail::run_model(c, out);
        throw InvalidParameter("unknown subcommand '" + c.subcommand + "'");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::invalid_parameter:
            case ErrorKind::resource_limit: return kExitInvalid;
            default: return kExitNumerical;
        }
    }
}

/// Parses argv into a RunConfig and runs it. --output redirects the report.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Heights and dynamics of phi_p(x) = (x^p - x)/p"};
    app.require_subcommand(1);
    RunConfig c;
    c.bits = default_bits();
    std::string format = "json";

    auto common = [&](CLI::App* sub) {
        sub->add_option("--p", c.p, "prime p")->default_val(2);
        sub->add_option("--bits", c.bits, "mantissa bits (default 128 or $DYNHEIGHT_BITS)");
        sub->add_option("--format", format, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}));
        sub->add_option("--output", c.output, "write the report to this file");
        sub->add_flag("--no-timing", c.no_timing, "zero all timing fields");
        sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
        sub->add_option("--orbit-cap", c.orbit_cap, "maximum number of orbit leaves");
    };

    auto* heights = app.add_subcommand("heights", "average heights of phi_p^{-n}(1) for n = 1..n_max");
    common(heights);
    heights->add_option("--n-max", c.n_max, "largest depth")->required();

    auto* padic = app.add_subcommand("padic", "p-adic backward orbit of 1 and splitting check");
    common(padic);
    padic->add_option("--n", c.n, "depth")->required();
    padic->add_option("--digits", c.digits, "working p-adic digits K (default 64 + n)");

    auto* orbit = app.add_subcommand("orbit", "complex backward orbit leaves");
    common(orbit);
    orbit->add_option("--n", c.n, "depth")->required();
    // Base-point options bind per subcommand; defaults on a shared field would clobber each other.
    std::string orbit_re = "1", orbit_im = "0";
    orbit->add_option("--base-re", orbit_re, "real part of the base point (rational)")->capture_default_str();
    orbit->add_option("--base-im", orbit_im, "imaginary part of the base point (rational)")->capture_default_str();

    auto* green = app.add_subcommand("green", "escape-rate function at a point");
    common(green);
    green->add_option("--re", c.re, "real part (rational)")->required();
    green->add_option("--im", c.im, "imaginary part (rational)")->default_val("0");

    auto* pairing = app.add_subcommand("pairing", "Arakelov-Zhang pairing <x^2, phi_p>");
    common(pairing);
    pairing->add_option("--method", c.method, "pullback | decomposition")->check(CLI::IsMember({"pullback", "decomposition"}));
    pairing->add_option("--n", c.n, "pullback depth")->default_val(14);
    pairing->add_option("--samples", c.samples, "unit-circle samples for the decomposition")->default_val(64);
    std::string pairing_re = "41/100", pairing_im = "37/100";
    pairing->add_option("--base-re", pairing_re, "real part of the base point (rational)")->capture_default_str();
    pairing->add_option("--base-im", pairing_im, "imaginary part of the base point (rational)")->capture_default_str();

    auto* model = app.add_subcommand("model", "coefficients of the monic integer model F_n");
    common(model);
    model->add_option("--n", c.n, "depth")->required();
    model->add_option("--degree-cap", c.degree_cap, "maximum degree");
    model->add_option("--coefficient-bits-cap", c.coefficient_bits_cap, "maximum coefficient size in bits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream sink_out, sink_err;
        int code = app.exit(e, sink_out, sink_err);
        out << sink_out.str();
        err << sink_err.str();
        return code == 0 ? kExitOk : kExitInvalid;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    if (c.subcommand == "orbit") c.base_re = orbit_re, c.base_im = orbit_im;
    if (c.subcommand == "pairing") c.base_re = pairing_re, c.base_im = pairing_im;
    c.format = format == "csv" ? Format::csv : format == "table" ? Format::table : Format::json;

    if (c.output.empty()) return run(c, out, err);
    std::ostringstream buffer;
    int code = run(c, buffer, err);
    std::ofstream file(c.output);
    if (!file) {
        err << "error: cannot open output file " << c.output << '\n';
        return kExitInvalid;
    }
    file << buffer.str();
    return code;
}

}  // namespace dynheight::cli
