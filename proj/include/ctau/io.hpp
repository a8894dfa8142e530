#pragma once
#include <memory>
#include <string>

#include "ctau/cover.hpp"
#include "ctau/quiver.hpp"
#include "ctau/rep.hpp"

namespace ctau {

/* Algebra files:
     vertex <id>
     arrow <id> <src> <tgt>
     relation <term> [± <term> ...]    # term = [coef*]arrows, textual right-to-left
   '#' starts a comment. Multi-arrow terms may separate arrows with '.'. */
BoundQuiver parse_algebra(const std::string& text, const std::string& name);
BoundQuiver load_algebra(const std::string& path);

/* Composition-order walk syntax: "c.-d.a" or "c-da" — a first, then d
   backwards, then c. '-' or '~' immediately before an arrow inverts it. */
Walk parse_walk(const BoundQuiver& bq, const std::string& s);

/* Grading files (over an already-loaded algebra):
     group abelian <rank>          # generators are implicitly g1..gn
     group free <name> [...]
     weight <arrow> <word>         # word = space-separated name[^exp] tokens
   Arrows without a weight line sit at the identity. */
Grading parse_grading(const BoundQuiver& bq, const std::string& text, const std::string& name);
Grading load_grading(const BoundQuiver& bq, const std::string& path);

/* Module files:
     module over <algebra file>    # path relative to the module file
     dim <vertex> <n>              # omitted vertices are zero
     map <arrow> <r>,<r>;...       # rows ';'-separated, entries ','-separated
   Omitted maps are zero. The loaded module owns its algebra. */
struct LoadedModule {
  std::unique_ptr<BoundQuiver> bq;
  RepT<Rat> rep;
};
LoadedModule parse_module(const std::string& text, const std::string& name, const std::string& dir);
LoadedModule load_module(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace ctau
