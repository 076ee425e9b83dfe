#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dopt/family.hpp"
#include "dopt/matrices.hpp"
#include "dopt/modring.hpp"
#include "dopt/params.hpp"

namespace dopt {

/// One stored design: blocks are given orbit-coded as (H, I, J).
struct CatalogEntry {
    ParameterSet ps;
    std::vector<Int> H;
    std::vector<Int> I;
    std::vector<Int> J;
    std::string label;
    std::string source;
};

struct CatalogFile {
    int version = 1;
    std::vector<CatalogEntry> entries;
};

struct CatalogParseError : std::runtime_error {
    int line;
    CatalogParseError(int line_no, const std::string& what)
        : std::runtime_error("catalog line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

struct CatalogVerifyError : std::runtime_error {
    std::vector<std::string> labels;
    CatalogVerifyError(std::vector<std::string> bad, const std::string& what)
        : std::runtime_error(what), labels(std::move(bad)) {}
};

inline DifferenceFamily family_from_entry(const CatalogEntry& e,
                                          std::vector<std::string>* warnings = nullptr) {
    const UnitSubgroup H = subgroup_from_elements(e.ps.v, e.H);
    Block X = expand_union(H, e.I, warnings);
    Block Y = expand_union(H, e.J, warnings);
    return DifferenceFamily(std::move(X), std::move(Y), OrbitSpec{H, e.I, e.J});
}

// ---- text format -----------------------------------------------------------
//
//   format 1
//
//   ps 111 51 46 42
//   H 1 10 100
//   I 3 8 ...
//   J 0 2 ...
//   label 111a-1
//   source sec3
//
// Stanzas separated by one blank line; single spaces; LF endings.

inline std::string catalog_to_text(const CatalogFile& cf) {
    std::string out = "format " + std::to_string(cf.version) + "\n";
    auto numbers = [](const char* key, const std::vector<Int>& xs) {
        std::string line = key;
        for (Int x : xs) line += " " + std::to_string(x);
        return line + "\n";
    };
    for (const CatalogEntry& e : cf.entries) {
        out += "\n";
        out += numbers("ps", {e.ps.v, e.ps.r, e.ps.s, e.ps.lambda});
        out += numbers("H", e.H);
        out += numbers("I", e.I);
        out += numbers("J", e.J);
        out += "label " + e.label + "\n";
        out += "source " + e.source + "\n";
    }
    return out;
}

namespace detail {

inline std::vector<Int> parse_numbers(const std::string& body, int line_no) {
    std::vector<Int> out;
    std::string tok;
    for (size_t i = 0; i <= body.size(); ++i) {
        const char c = i < body.size() ? body[i] : ' ';
        if (c == ' ') {
            if (tok.empty()) {
                if (i < body.size()) throw CatalogParseError(line_no, "extra whitespace");
                continue;
            }
            size_t pos = 0;
            Int val = 0;
            try {
                val = std::stoll(tok, &pos);
            } catch (const std::exception&) {
                throw CatalogParseError(line_no, "not an integer: '" + tok + "'");
            }
            if (pos != tok.size()) throw CatalogParseError(line_no, "not an integer: '" + tok + "'");
            out.push_back(val);
            tok.clear();
        } else {
            tok += c;
        }
    }
    return out;
}

}  // namespace detail

inline CatalogFile catalog_from_text(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);

    CatalogFile cf;
    if (lines.empty() || lines[0].rfind("format ", 0) != 0)
        throw CatalogParseError(1, "expected 'format <version>' header");
    cf.version = static_cast<int>(detail::parse_numbers(lines[0].substr(7), 1).at(0));
    if (cf.version != 1) throw CatalogParseError(1, "unsupported format version");

    size_t i = 1;
    auto key_line = [&](const char* key) -> std::string {
        const int line_no = static_cast<int>(i) + 1;
        if (i >= lines.size()) throw CatalogParseError(line_no, std::string("expected '") + key + "'");
        const std::string& ln = lines[i];
        const std::string prefix = std::string(key);
        if (ln == prefix) {
            ++i;
            return "";
        }
        if (ln.rfind(prefix + " ", 0) != 0)
            throw CatalogParseError(line_no, std::string("expected '") + key + "', got '" + ln + "'");
        ++i;
        return ln.substr(prefix.size() + 1);
    };
    while (i < lines.size()) {
        if (!lines[i].empty())
            throw CatalogParseError(static_cast<int>(i) + 1, "expected blank line between stanzas");
        ++i;
        if (i >= lines.size()) break;  // trailing blank line tolerated
        CatalogEntry e;
        int first_line = static_cast<int>(i) + 1;
        auto psv = detail::parse_numbers(key_line("ps"), first_line);
        if (psv.size() != 4) throw CatalogParseError(first_line, "ps needs 4 integers");
        e.ps = ParameterSet{psv[0], psv[1], psv[2], psv[3]};
        e.H = detail::parse_numbers(key_line("H"), static_cast<int>(i));
        e.I = detail::parse_numbers(key_line("I"), static_cast<int>(i));
        e.J = detail::parse_numbers(key_line("J"), static_cast<int>(i));
        e.label = key_line("label");
        e.source = key_line("source");
        if (e.label.empty()) throw CatalogParseError(static_cast<int>(i), "empty label");
        cf.entries.push_back(std::move(e));
    }
    return cf;
}

/// Checks label uniqueness and runs the coverage verifier on every entry.
/// Throws CatalogVerifyError naming the offending entries.
inline void verify_catalog(const CatalogFile& cf) {
    std::vector<std::string> bad;
    std::string detail_msg;
    std::set<std::string> labels;
    for (const CatalogEntry& e : cf.entries) {
        if (!labels.insert(e.label).second) {
            bad.push_back(e.label);
            detail_msg += e.label + ": duplicate label\n";
            continue;
        }
        try {
            DifferenceFamily df = family_from_entry(e);
            VerifyReport rep = verify_df(df, e.ps);
            if (!rep.pass) {
                bad.push_back(e.label);
                detail_msg += e.label + ": coverage check failed";
                if (!rep.size_x_ok || !rep.size_y_ok) detail_msg += " (block size mismatch)";
                if (!rep.violations.empty()) {
                    detail_msg += ", violated d:";
                    for (size_t k = 0; k < rep.violations.size() && k < 8; ++k)
                        detail_msg += " " + std::to_string(rep.violations[k].d);
                    if (rep.violations.size() > 8) detail_msg += " ...";
                }
                detail_msg += "\n";
            }
        } catch (const std::invalid_argument& ex) {
            bad.push_back(e.label);
            detail_msg += e.label + ": " + ex.what() + "\n";
        }
    }
    if (!bad.empty()) throw CatalogVerifyError(bad, detail_msg);
}

inline void save_catalog(const CatalogFile& cf, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << catalog_to_text(cf);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline CatalogFile load_catalog(const std::string& path, bool verify_entries = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    CatalogFile cf = catalog_from_text(buf.str());
    if (verify_entries) verify_catalog(cf);
    return cf;
}

// ---- JSON export ------------------------------------------------------------

inline nlohmann::json entry_to_json(const CatalogEntry& e) {
    return nlohmann::json{
        {"ps", {{"v", e.ps.v}, {"r", e.ps.r}, {"s", e.ps.s}, {"lambda", e.ps.lambda}}},
        {"H", e.H},
        {"I", e.I},
        {"J", e.J},
        {"label", e.label},
        {"source", e.source},
    };
}

inline nlohmann::json catalog_to_json(const CatalogFile& cf) {
    nlohmann::json entries = nlohmann::json::array();
    for (const CatalogEntry& e : cf.entries) entries.push_back(entry_to_json(e));
    return nlohmann::json{{"format", cf.version}, {"entries", entries}};
}

// ---- builtin data -----------------------------------------------------------

/// Every published design shipped with the library.
inline const CatalogFile& builtin_catalog() {
    static const CatalogFile cf = [] {
        CatalogFile f;
        auto e = [&f](ParameterSet ps, std::vector<Int> H, std::vector<Int> I, std::vector<Int> J,
                      const char* label, const char* source) {
            f.entries.push_back(
                CatalogEntry{ps, std::move(H), std::move(I), std::move(J), label, source});
        };
        e({111,51,46,42}, {1,10,100},
          {3,8,13,14,15,16,21,26,31,32,43,51,52,53,55,63,64},
          {0,2,3,5,7,13,14,15,26,31,43,52,53,54,63,64},
          "111a-1", "sec3");
        e({111,51,46,42}, {1,10,100},
          {1,4,8,13,15,21,22,26,27,41,42,43,44,52,53,63,64},
          {0,1,2,4,11,13,14,17,21,25,33,42,52,53,62,63},
          "111a-2", "sec3");
        e({111,51,46,42}, {1,10,100},
          {1,3,5,7,9,13,14,15,17,27,31,42,44,51,52,62,63},
          {0,1,2,4,11,17,21,25,42,43,51,53,54,55,62,64},
          "111a-3", "sec3");
        e({111,51,46,42}, {1,10,100},
          {1,2,6,8,13,14,15,16,21,27,31,41,43,52,53,55,63},
          {0,1,2,4,5,11,16,17,21,22,32,33,43,44,54,63},
          "111a-4", "sec3");
        e({111,51,46,42}, {1,10,100},
          {1,2,4,8,9,15,16,26,31,33,42,44,51,53,54,55,63},
          {0,2,3,4,8,13,16,21,41,44,51,52,55,62,63,64},
          "111a-5", "sec3");
        e({111,55,45,45}, {1,10,100},
          {0,2,6,13,14,16,17,18,22,26,33,43,51,52,53,54,55,63,64},
          {2,3,4,6,13,14,17,21,25,27,41,54,55,63,64},
          "111b-1", "sec3");
        e({111,55,45,45}, {1,10,100},
          {0,3,4,6,7,8,9,13,16,25,32,41,42,44,52,54,62,63,64},
          {2,3,5,7,13,17,21,25,41,44,51,52,55,62,63},
          "111b-2", "sec3");
        e({111,55,45,45}, {1,10,100},
          {0,5,6,9,13,14,17,21,25,31,32,33,41,42,43,53,62,63,64},
          {2,5,6,8,13,16,18,31,33,43,51,54,55,62,63},
          "111b-3", "sec3");
        e({111,55,45,45}, {1,10,100},
          {0,3,4,5,7,14,15,18,22,26,27,32,42,43,52,55,62,63,64},
          {2,5,9,15,18,22,25,32,33,41,42,43,44,52,53},
          "111b-4", "sec3");
        e({111,55,45,45}, {1,10,100},
          {0,3,4,5,7,9,15,16,22,25,26,32,42,44,51,53,54,55,64},
          {2,4,14,15,17,18,21,25,41,43,51,52,54,63,64},
          "111b-5", "sec3");
        e({117,56,48,46}, {1,16,22},
          {2,7,8,9,10,13,18,19,20,39,41,47,51,56,58,63,73,78,79,95},
          {0,1,2,5,6,8,12,19,25,34,39,41,47,56,57,63,78,79},
          "117a-1", "sec3");
        e({117,56,48,46}, {1,16,22},
          {3,5,6,7,18,19,21,24,25,26,28,29,39,42,47,56,57,58,78,95},
          {0,1,3,7,14,24,25,29,34,39,41,47,51,56,57,63,78,79},
          "117a-2", "sec3");
        e({117,56,48,46}, {1,16,22},
          {1,3,7,13,17,19,20,24,26,28,29,39,41,47,51,57,58,78,79,95},
          {0,4,7,9,12,13,17,18,20,25,28,29,34,35,39,51,56,78},
          "117a-3", "sec3");
        e({117,56,48,46}, {1,16,22},
          {1,2,3,4,5,6,10,12,13,14,19,20,24,29,35,39,47,73,78,79},
          {0,4,6,13,14,21,26,28,29,36,39,40,56,57,58,73,78,95},
          "117a-4", "sec3");
        e({117,56,48,46}, {1,16,22},
          {2,3,5,7,10,13,21,24,25,26,28,35,39,42,51,56,57,58,63,78},
          {0,3,5,13,14,17,19,20,25,34,36,39,47,51,56,63,73,78},
          "117a-5", "sec3");
        e({117,56,48,46}, {1,16,22},
          {3,5,9,10,13,18,20,21,25,34,35,36,39,41,51,56,58,63,78,95},
          {0,8,9,10,12,13,14,19,26,28,35,39,51,56,57,58,63,78},
          "117a-6", "sec3");
        e({117,56,48,46}, {1,16,22},
          {3,4,5,6,7,12,13,17,19,24,26,36,39,41,42,47,57,73,78,79},
          {0,3,7,13,20,25,28,34,35,36,39,47,51,56,57,73,78,95},
          "117a-7", "sec3");
        e({117,56,48,46}, {1,16,22},
          {1,2,6,7,9,12,17,18,20,25,28,36,39,41,51,56,58,63,78,79},
          {0,1,2,5,9,12,13,18,28,29,39,40,41,47,51,56,73,78},
          "117a-8", "sec3");
        e({129,57,56,49}, {1,49,79},
          {1,6,7,17,20,21,22,26,31,35,39,42,44,57,60,62,63,68,73},
          {0,1,3,11,12,19,20,22,31,35,39,44,50,63,65,68,70,73,78,86},
          "129a-1", "sec3");
        e({139,67,58,56}, {1,42,96},
          {0,3,5,8,9,15,21,22,23,24,25,34,39,41,46,49,62,66,69,72,75,82,85},
          {0,4,6,8,9,11,12,18,23,26,33,34,36,39,41,49,59,65,66,78},
          "139a-1", "sec3");
        e({139,67,58,56}, {1,42,96},
          {0,2,4,11,13,14,17,21,22,25,26,28,34,41,43,56,59,62,65,66,72,82,85},
          {0,1,3,11,12,13,15,17,21,23,25,26,31,33,36,41,65,68,69,75},
          "139a-2", "sec3");
        e({85,36,36,30}, {1,9,16,19,21,49,59,81},
          {3,12,15,17,24,34},
          {1,4,5,8,17,34},
          "85a-1", "sec5");
        e({113,49,49,42}, {1,16,28,30,49,106,109},
          {1,2,3,7,17,27,40},
          {2,3,4,5,6,8,10},
          "113a-1", "sec5");
        e({145,64,64,56}, {1,16,36,81,111,136,141},
          {1,3,4,7,8,10,12,26,29,40},
          {1,2,5,7,11,13,20,23,29,39},
          "145a-1", "sec5");
        e({145,64,64,56}, {1,16,36,81,111,136,141},
          {1,3,4,7,8,10,12,26,29,40},
          {3,5,7,14,20,22,23,24,26,116},
          "145a-2", "sec5");
        return f;
    }();
    return cf;
}

}  // namespace dopt
