#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfetc/model.hpp"
#include "nfetc/type_forest.hpp"

namespace nfetc {

/// Text checkpoint. Layout:
///
///   nfetc-checkpoint 1
///   config <key> <value>            (one per ModelConfig field)
///   type <slash-path>               (K lines, in type-id order)
///   tensor <name> <trainable 0|1> <rank> <extent>...
///   <values separated by single spaces>
///   ...
///   end
///
/// Values use the shortest decimal form that parses back to the same double,
/// so save/load round-trips bit-exactly.
struct Checkpoint {
  NfetcModel model;
  std::vector<std::string> type_names;
};

void save_checkpoint(std::ostream& out, const NfetcModel& model, const TypeForest& forest);
void save_checkpoint(const std::filesystem::path& file, const NfetcModel& model,
                     const TypeForest& forest);

Checkpoint load_checkpoint(std::istream& in, const std::string& source);
Checkpoint load_checkpoint(const std::filesystem::path& file);

/// Throws unless the checkpoint was trained over exactly this forest.
void check_forest(const Checkpoint& checkpoint, const TypeForest& forest);

std::string format_double(double v);

}  // namespace nfetc
