#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pw::cli {

/// Runs `pantswork <args...>` (args exclude the program name) and returns its
/// exit code. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expected outcome of one corpus fixture, as stored in the corpus file.
struct CorpusEntry {
  std::string name, verdict, growth = "-", interval = "-", provenance;
};

std::vector<CorpusEntry> read_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<CorpusEntry>& entries);

}  // namespace pw::cli
