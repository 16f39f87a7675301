#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bi/parser.hpp"
#include "bi/source.hpp"

namespace bi {

enum class Tok {
  Eof,
  Ident,
  IntLit,
  // keywords
  KwClass,
  KwExtends,
  KwAbstract,
  KwVar,
  KwConst,
  KwInvariant,
  KwInit,
  KwFinal,
  KwOp,
  KwOverride,
  KwSystem,
  KwConstraint,
  KwOn,
  KwForall,
  KwExt,
  KwBool,
  KwInt,
  KwEnum,
  KwSeq,
  KwTrue,
  KwFalse,
  KwHead,
  KwTail,
  KwIsEmpty,
  // punctuation and operators
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Semi,
  Colon,
  Arrow,     // ->
  DotDot,    // ..
  Dot,       // .
  EqOp,      // =
  NeOp,      // /=
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  ImpliesOp,  // =>
  AndOp,      // conjunction, spelled /\ in the surface syntax
  OrOp,       // disjunction, spelled \/
  NotOp,      // ~
  ConcatOp,   // ++
  EmptySeqTok,  // <>
  Hash,       // #
};

/// Identifier decorations, Z style: x' (after state), x? (input), x! (output).
enum class Decoration { None, Prime, Question, Bang };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::int64_t int_value = 0;
  Decoration dec = Decoration::None;
  SourceSpan span;
};

const char* token_description(Tok kind);

/// Tokenizes the whole input. Unknown characters become ParseErrors and are
/// skipped, so the token stream always ends with Eof.
std::vector<Token> lex(std::string_view source, const std::string& filename,
                       std::vector<ParseError>& errors);

}  // namespace bi
