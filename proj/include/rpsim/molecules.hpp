#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "rpsim/radical.hpp"

namespace rpsim {

inline constexpr int kMoleculeFormatVersion = 1;

/// Two radicals as stored in a .mol file. Provenance lives on each Nucleus.
struct MoleculeFile {
  int version = kMoleculeFormatVersion;
  std::string name;
  RadicalSpec radical1;
  RadicalSpec radical2;
  std::string notes;          // free text, one line per `note` entry
  std::uint64_t checksum = 0; // FNV-1a 64 over the canonical body

  /// Recompute the checksum from the current contents.
  std::uint64_t compute_checksum() const;
};

/// Canonical text of the file without the checksum line. Numbers use %.17g,
/// isotropic tensors are written as scalars.
std::string canonical_body(const MoleculeFile& file);

/// Full text including a `checksum` line.
std::string write_molecule_text(MoleculeFile file);
void write_molecule(const MoleculeFile& file, const std::filesystem::path& path);

/// Parse text. Errors name the line number and field. If the text carries a
/// checksum it must match the parsed contents. `origin` prefixes messages.
MoleculeFile parse_molecule(const std::string& text, const std::string& origin = "<text>");

/// Load, validate both radicals against the dimension cap, and return the file.
MoleculeFile load_molecule_file(const std::filesystem::path& path,
                                std::size_t dimension_cap = kDefaultDimensionCap);

std::pair<RadicalSpec, RadicalSpec> load_molecule(const std::filesystem::path& path,
                                                  std::size_t dimension_cap = kDefaultDimensionCap);

/// Resolve a molecule name or path: existing path first, then
/// $RPSIM_MOLECULE_DIR, then the data directory compiled into the build.
std::filesystem::path resolve_molecule_path(const std::string& name_or_path);

/// Directory searched when RPSIM_MOLECULE_DIR is unset.
std::filesystem::path default_molecule_dir();

/// Keep the n_keep nuclei with the largest tensor Frobenius norm. Ties keep
/// the earlier nucleus in file order. Kept nuclei retain their file order.
RadicalSpec truncate_bath(const RadicalSpec& spec, std::size_t n_keep);

/// Built-in presets, identical to the shipped files.
MoleculeFile preset_py_dma();
/// FADH with a stand-in anisotropic tensor set (not measured data) paired with
/// a bare superoxide electron.
MoleculeFile preset_fadh_o2_standin();
RadicalSpec preset_py();
RadicalSpec preset_dma();
RadicalSpec preset_superoxide();

std::string format_checksum(std::uint64_t c);

}  // namespace rpsim
