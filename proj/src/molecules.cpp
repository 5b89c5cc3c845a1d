#include "rpsim/molecules.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rpsim/errors.hpp"

#ifndef RPSIM_DATA_DIR
#define RPSIM_DATA_DIR "data/molecules"
#endif

namespace rpsim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool stored_as_scalar(const Nucleus& n) {
  if (n.asymmetric) return false;
  const Mat3& t = n.hyperfine;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j && t(i, j) != 0.0) return false;
  return t(0, 0) == t(1, 1) && t(1, 1) == t(2, 2);
}

void write_radical(std::ostringstream& os, const RadicalSpec& r) {
  os << "radical " << r.name << "\n";
  for (const auto& n : r.nuclei) {
    os << "nucleus " << n.label << " " << n.multiplicity;
    if (stored_as_scalar(n)) {
      os << " iso " << fmt(n.hyperfine(0, 0));
    } else {
      os << (n.asymmetric ? " tensor-asym" : " tensor");
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << " " << fmt(n.hyperfine(i, j));
    }
    os << "\n";
    if (!n.provenance.empty()) os << "provenance \"" << n.provenance << "\"\n";
  }
  os << "end\n";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strip a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

struct Parser {
  std::string origin;
  int line = 0;

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << origin << ":" << line << ": " << field << ": " << msg;
    throw ConfigError(os.str());
  }

  double number(const std::string& tok, const std::string& field) const {
    if (tok == "?")
      fail(field, "template placeholder; supply a value in mT before use");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail(field, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) fail(field, "expected a number, got '" + tok + "'");
    return v;
  }

  int integer(const std::string& tok, const std::string& field) const {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      fail(field, "expected an integer, got '" + tok + "'");
    }
    if (used != tok.size()) fail(field, "expected an integer, got '" + tok + "'");
    return v;
  }
};

}  // namespace

std::string format_checksum(std::uint64_t c) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(c));
  return buf;
}

std::string canonical_body(const MoleculeFile& file) {
  std::ostringstream os;
  os << "format " << file.version << "\n";
  os << "units mT\n";
  if (!file.name.empty()) os << "name " << file.name << "\n";
  if (!file.notes.empty()) {
    std::istringstream in(file.notes);
    std::string l;
    while (std::getline(in, l)) os << "note " << l << "\n";
  }
  write_radical(os, file.radical1);
  write_radical(os, file.radical2);
  return os.str();
}

std::uint64_t MoleculeFile::compute_checksum() const { return fnv1a(canonical_body(*this)); }

std::string write_molecule_text(MoleculeFile file) {
  return canonical_body(file) + "checksum " + format_checksum(file.compute_checksum()) + "\n";
}

void write_molecule(const MoleculeFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write molecule file " + path.string());
  out << write_molecule_text(file);
}

MoleculeFile parse_molecule(const std::string& text, const std::string& origin) {
  MoleculeFile file;
  Parser p{origin};
  std::istringstream in(text);
  std::string raw;
  bool have_format = false, have_units = false, have_checksum = false;
  std::uint64_t stated = 0;
  int radicals = 0;
  RadicalSpec* current = nullptr;
  std::string notes;

  while (std::getline(in, raw)) {
    ++p.line;
    const std::string l = trim(strip_comment(raw));
    if (l.empty()) continue;
    std::istringstream ls(l);
    std::string key;
    ls >> key;
    if (have_checksum) p.fail(key, "content after the checksum line");

    if (key == "format") {
      std::string v;
      ls >> v;
      file.version = p.integer(v, "format");
      if (file.version != kMoleculeFormatVersion)
        p.fail("format", "unsupported version " + v);
      have_format = true;
    } else if (!have_format) {
      p.fail(key, "file must start with 'format 1'");
    } else if (key == "units") {
      std::string u;
      ls >> u;
      if (u != "mT") p.fail("units", "must be 'mT', got '" + u + "'");
      have_units = true;
    } else if (!have_units) {
      p.fail(key, "'units mT' must precede data");
    } else if (key == "name") {
      if (current) p.fail("name", "not allowed inside a radical block");
      file.name = trim(l.substr(4));
    } else if (key == "note") {
      if (current) p.fail("note", "not allowed inside a radical block");
      notes += trim(l.substr(4)) + "\n";
    } else if (key == "radical") {
      if (current) p.fail("radical", "previous radical block not closed with 'end'");
      if (radicals == 2) p.fail("radical", "exactly two radical blocks are allowed");
      current = radicals == 0 ? &file.radical1 : &file.radical2;
      ++radicals;
      ls >> current->name;
      if (current->name.empty()) p.fail("radical", "missing name");
    } else if (key == "end") {
      if (!current) p.fail("end", "no open radical block");
      current = nullptr;
    } else if (key == "nucleus") {
      if (!current) p.fail("nucleus", "outside a radical block");
      Nucleus n;
      std::string mult, kind;
      ls >> n.label >> mult >> kind;
      if (n.label.empty()) p.fail("nucleus", "missing label");
      n.multiplicity = p.integer(mult, "nucleus " + n.label + " multiplicity");
      if (n.multiplicity < 2)
        p.fail("nucleus " + n.label + " multiplicity", "must be >= 2 (2I+1)");
      std::vector<std::string> vals;
      for (std::string t; ls >> t;) vals.push_back(t);
      if (kind == "iso") {
        if (vals.size() != 1) p.fail("nucleus " + n.label + " iso", "expects one value");
        n.hyperfine = isotropic_tensor(p.number(vals[0], "nucleus " + n.label + " iso"));
      } else if (kind == "tensor" || kind == "tensor-asym") {
        if (vals.size() != 9)
          p.fail("nucleus " + n.label + " " + kind, "expects nine values, got " +
                                                        std::to_string(vals.size()));
        for (int k = 0; k < 9; ++k)
          n.hyperfine(k / 3, k % 3) =
              p.number(vals[k], "nucleus " + n.label + " entry " + std::to_string(k + 1));
        n.asymmetric = kind == "tensor-asym";
        if (!n.asymmetric) {
          const double asym = (n.hyperfine - n.hyperfine.transpose()).cwiseAbs().maxCoeff();
          if (asym > 1e-9)
            p.fail("nucleus " + n.label + " tensor",
                   "not symmetric (max |A - A^T| = " + fmt(asym) +
                       "); use tensor-asym to allow this");
        }
      } else {
        p.fail("nucleus " + n.label, "coupling kind must be iso, tensor or tensor-asym");
      }
      current->nuclei.push_back(std::move(n));
    } else if (key == "provenance") {
      if (!current || current->nuclei.empty())
        p.fail("provenance", "must follow a nucleus line");
      const std::string rest = trim(l.substr(10));
      if (rest.size() < 2 || rest.front() != '"' || rest.back() != '"')
        p.fail("provenance", "text must be double-quoted");
      current->nuclei.back().provenance = rest.substr(1, rest.size() - 2);
    } else if (key == "checksum") {
      if (current) p.fail("checksum", "inside a radical block");
      std::string h;
      ls >> h;
      try {
        std::size_t used = 0;
        stated = std::stoull(h, &used, 16);
        if (used != h.size() || h.size() != 16) throw std::invalid_argument(h);
      } catch (const std::exception&) {
        p.fail("checksum", "expected 16 hex digits, got '" + h + "'");
      }
      have_checksum = true;
    } else {
      p.fail(key, "unknown keyword");
    }
  }
  if (current) p.fail("end", "radical block '" + current->name + "' not closed");
  if (!have_format) p.fail("format", "missing 'format' line");
  if (!have_units) p.fail("units", "missing 'units mT' line");
  if (radicals != 2) p.fail("radical", "expected two radical blocks, found " + std::to_string(radicals));
  file.notes = notes;
  file.checksum = file.compute_checksum();
  if (have_checksum && stated != file.checksum)
    throw ConfigError(origin + ": checksum mismatch: file states " + format_checksum(stated) +
                      ", contents give " + format_checksum(file.checksum));
  return file;
}

MoleculeFile load_molecule_file(const std::filesystem::path& path, std::size_t dimension_cap) {
  std::ifstream in(path);
  if (!in) throw ConfigError("molecule file not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  MoleculeFile f = parse_molecule(ss.str(), path.string());
  try {
    validate(f.radical1, dimension_cap);
    validate(f.radical2, dimension_cap);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return f;
}

std::pair<RadicalSpec, RadicalSpec> load_molecule(const std::filesystem::path& path,
                                                  std::size_t dimension_cap) {
  auto f = load_molecule_file(path, dimension_cap);
  return {f.radical1, f.radical2};
}

std::filesystem::path default_molecule_dir() {
  if (const char* env = std::getenv("RPSIM_MOLECULE_DIR"); env && *env) return env;
  return RPSIM_DATA_DIR;
}

std::filesystem::path resolve_molecule_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  const fs::path direct(name_or_path);
  if (fs::exists(direct)) return direct;
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("RPSIM_MOLECULE_DIR"); env && *env) dirs.emplace_back(env);
  dirs.emplace_back(RPSIM_DATA_DIR);
  for (const auto& d : dirs) {
    for (const auto& cand : {d / name_or_path, d / (name_or_path + ".mol")})
      if (fs::exists(cand)) return cand;
  }
  std::string msg = "molecule '" + name_or_path + "' not found; searched";
  for (const auto& d : dirs) msg += " " + d.string();
  msg += " (set RPSIM_MOLECULE_DIR to add a directory)";
  throw ConfigError(msg);
}

RadicalSpec truncate_bath(const RadicalSpec& spec, std::size_t n_keep) {
  n_keep = std::min(n_keep, spec.nuclei.size());
  std::vector<std::size_t> order(spec.nuclei.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.nuclei[a].hyperfine.norm() > spec.nuclei[b].hyperfine.norm();
  });
  order.resize(n_keep);
  std::sort(order.begin(), order.end());
  RadicalSpec out;
  out.name = spec.name;
  for (auto i : order) out.nuclei.push_back(spec.nuclei[i]);
  return out;
}

namespace {

Nucleus iso_nucleus(const std::string& label, int mult, double lambda, const std::string& prov) {
  Nucleus n;
  n.label = label;
  n.multiplicity = mult;
  n.hyperfine = isotropic_tensor(lambda);
  n.provenance = prov;
  return n;
}

Nucleus tensor_nucleus(const std::string& label, int mult, const Mat3& a, const std::string& prov) {
  Nucleus n;
  n.label = label;
  n.multiplicity = mult;
  n.hyperfine = a;
  n.provenance = prov;
  return n;
}

const char* kHore = "Table 2 of Hore et al. as quoted for this pair";
const char* kStandIn = "stand-in value for testing, not measured data";

}  // namespace

RadicalSpec preset_py() {
  RadicalSpec r;
  r.name = "Py";
  const char* labels1[] = {"H1", "H3", "H6", "H8"};
  const char* labels2[] = {"H4", "H5", "H9", "H10"};
  for (auto l : labels1) r.nuclei.push_back(iso_nucleus(l, 2, 0.481, kHore));
  for (auto l : labels2) r.nuclei.push_back(iso_nucleus(l, 2, 0.212, kHore));
  for (auto l : {"H2", "H7"}) r.nuclei.push_back(iso_nucleus(l, 2, 0.103, kHore));
  return r;
}

RadicalSpec preset_dma() {
  RadicalSpec r;
  r.name = "DMA";
  for (int i = 1; i <= 6; ++i)
    r.nuclei.push_back(iso_nucleus("Hme" + std::to_string(i), 2, 1.180, kHore));
  r.nuclei.push_back(iso_nucleus("Hpara", 2, 0.520, kHore));
  r.nuclei.push_back(iso_nucleus("N", 3, 1.100, kHore));
  return r;
}

RadicalSpec preset_superoxide() {
  RadicalSpec r;
  r.name = "O2";
  return r;
}

MoleculeFile preset_py_dma() {
  MoleculeFile f;
  f.name = "py-dma";
  f.radical1 = preset_py();
  f.radical2 = preset_dma();
  f.checksum = f.compute_checksum();
  return f;
}

MoleculeFile preset_fadh_o2_standin() {
  MoleculeFile f;
  f.name = "fadh-o2-standin";
  f.notes = "FADH tensors below are illustrative stand-ins, not literature values";
  RadicalSpec r;
  r.name = "FADH";
  Mat3 n5 = Mat3::Zero();
  n5.diagonal() << -0.10, -0.10, 1.76;
  Mat3 n10 = Mat3::Zero();
  n10.diagonal() << -0.02, -0.02, 0.60;
  Mat3 h5;
  h5 << -0.25, 0.05, 0.0,
        0.05, -0.80, 0.0,
        0.0, 0.0, -0.55;
  Mat3 h6;
  h6 << -0.49, 0.0, 0.0,
        0.0, -0.30, 0.02,
        0.0, 0.02, -0.22;
  r.nuclei.push_back(tensor_nucleus("N5", 3, n5, kStandIn));
  r.nuclei.push_back(tensor_nucleus("N10", 3, n10, kStandIn));
  r.nuclei.push_back(tensor_nucleus("H5", 2, h5, kStandIn));
  r.nuclei.push_back(tensor_nucleus("H6", 2, h6, kStandIn));
  r.nuclei.push_back(iso_nucleus("H8me", 2, 0.40, kStandIn));
  f.radical1 = r;
  f.radical2 = preset_superoxide();
  f.checksum = f.compute_checksum();
  return f;
}

}  // namespace rpsim
