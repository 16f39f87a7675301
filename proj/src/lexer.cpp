#include "lexer.hpp"

#include <cctype>
#include <map>

namespace bi {

const char* token_description(Tok kind) {
  switch (kind) {
    case Tok::Eof: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer";
    case Tok::KwClass: return "'class'";
    case Tok::KwExtends: return "'extends'";
    case Tok::KwAbstract: return "'abstract'";
    case Tok::KwVar: return "'var'";
    case Tok::KwConst: return "'const'";
    case Tok::KwInvariant: return "'invariant'";
    case Tok::KwInit: return "'init'";
    case Tok::KwFinal: return "'final'";
    case Tok::KwOp: return "'op'";
    case Tok::KwOverride: return "'override'";
    case Tok::KwSystem: return "'system'";
    case Tok::KwConstraint: return "'constraint'";
    case Tok::KwOn: return "'on'";
    case Tok::KwForall: return "'forall'";
    case Tok::KwExt: return "'ext'";
    case Tok::KwBool: return "'bool'";
    case Tok::KwInt: return "'int'";
    case Tok::KwEnum: return "'enum'";
    case Tok::KwSeq: return "'seq'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwHead: return "'head'";
    case Tok::KwTail: return "'tail'";
    case Tok::KwIsEmpty: return "'isEmpty'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::DotDot: return "'..'";
    case Tok::Dot: return "'.'";
    case Tok::EqOp: return "'='";
    case Tok::NeOp: return "'/='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::ImpliesOp: return "'=>'";
    case Tok::AndOp: return "'/\\'";
    case Tok::OrOp: return "'\\/'";
    case Tok::NotOp: return "'~'";
    case Tok::ConcatOp: return "'++'";
    case Tok::EmptySeqTok: return "'<>'";
    case Tok::Hash: return "'#'";
  }
  return "?";
}

namespace {

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> kw = {
      {"class", Tok::KwClass},       {"extends", Tok::KwExtends},
      {"abstract", Tok::KwAbstract}, {"var", Tok::KwVar},
      {"const", Tok::KwConst},       {"invariant", Tok::KwInvariant},
      {"init", Tok::KwInit},         {"final", Tok::KwFinal},
      {"op", Tok::KwOp},             {"override", Tok::KwOverride},
      {"system", Tok::KwSystem},     {"constraint", Tok::KwConstraint},
      {"on", Tok::KwOn},             {"forall", Tok::KwForall},
      {"ext", Tok::KwExt},           {"bool", Tok::KwBool},
      {"int", Tok::KwInt},           {"enum", Tok::KwEnum},
      {"seq", Tok::KwSeq},           {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},       {"head", Tok::KwHead},
      {"tail", Tok::KwTail},         {"isEmpty", Tok::KwIsEmpty},
  };
  return kw;
}

struct Cursor {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= src.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos + ahead < src.size() ? src[pos + ahead] : '\0';
  }
  char take() {
    char c = src[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
};

}  // namespace

std::vector<Token> lex(std::string_view source, const std::string& filename,
                       std::vector<ParseError>& errors) {
  std::vector<Token> tokens;
  Cursor c{source};

  auto start_span = [&]() {
    SourceSpan s;
    s.file = filename;
    s.start_line = s.end_line = c.line;
    s.start_col = s.end_col = c.col;
    return s;
  };
  auto close_span = [&](SourceSpan& s) {
    s.end_line = c.line;
    s.end_col = c.col > 1 ? c.col - 1 : 1;
  };
  auto push = [&](Tok kind, SourceSpan span, std::string text = {}) {
    close_span(span);
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.span = std::move(span);
    tokens.push_back(std::move(t));
  };

  while (!c.done()) {
    char ch = c.peek();
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      c.take();
      continue;
    }
    if (ch == '/' && c.peek(1) == '/') {
      while (!c.done() && c.peek() != '\n') c.take();
      continue;
    }

    SourceSpan span = start_span();

    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string word;
      while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                           c.peek() == '_'))
        word += c.take();
      auto kw = keywords().find(word);
      if (kw != keywords().end()) {
        push(kw->second, span, word);
        continue;
      }
      Decoration dec = Decoration::None;
      if (c.peek() == '\'') {
        dec = Decoration::Prime;
        c.take();
      } else if (c.peek() == '?') {
        dec = Decoration::Question;
        c.take();
      } else if (c.peek() == '!') {
        dec = Decoration::Bang;
        c.take();
      }
      close_span(span);
      Token t;
      t.kind = Tok::Ident;
      t.text = std::move(word);
      t.dec = dec;
      t.span = std::move(span);
      tokens.push_back(std::move(t));
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string digits;
      while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek())))
        digits += c.take();
      close_span(span);
      Token t;
      t.kind = Tok::IntLit;
      t.text = digits;
      if (digits.size() > 18) {
        errors.push_back({span, "integer literal '" + digits + "' is too large", {}});
        t.int_value = 0;
      } else {
        t.int_value = std::stoll(digits);
      }
      t.span = std::move(span);
      tokens.push_back(std::move(t));
      continue;
    }

    c.take();
    switch (ch) {
      case '{': push(Tok::LBrace, span, "{"); break;
      case '}': push(Tok::RBrace, span, "}"); break;
      case '(': push(Tok::LParen, span, "("); break;
      case ')': push(Tok::RParen, span, ")"); break;
      case ',': push(Tok::Comma, span, ","); break;
      case ';': push(Tok::Semi, span, ";"); break;
      case ':': push(Tok::Colon, span, ":"); break;
      case '~': push(Tok::NotOp, span, "~"); break;
      case '#': push(Tok::Hash, span, "#"); break;
      case '+':
        if (c.peek() == '+') {
          c.take();
          push(Tok::ConcatOp, span, "++");
        } else {
          push(Tok::Plus, span, "+");
        }
        break;
      case '-':
        if (c.peek() == '>') {
          c.take();
          push(Tok::Arrow, span, "->");
        } else {
          push(Tok::Minus, span, "-");
        }
        break;
      case '.':
        if (c.peek() == '.') {
          c.take();
          push(Tok::DotDot, span, "..");
        } else {
          push(Tok::Dot, span, ".");
        }
        break;
      case '=':
        if (c.peek() == '>') {
          c.take();
          push(Tok::ImpliesOp, span, "=>");
        } else {
          push(Tok::EqOp, span, "=");
        }
        break;
      case '<':
        if (c.peek() == '>') {
          c.take();
          push(Tok::EmptySeqTok, span, "<>");
        } else if (c.peek() == '=') {
          c.take();
          push(Tok::Le, span, "<=");
        } else {
          push(Tok::Lt, span, "<");
        }
        break;
      case '>':
        if (c.peek() == '=') {
          c.take();
          push(Tok::Ge, span, ">=");
        } else {
          push(Tok::Gt, span, ">");
        }
        break;
      case '/':
        if (c.peek() == '=') {
          c.take();
          push(Tok::NeOp, span, "/=");
        } else if (c.peek() == '\\') {
          c.take();
          push(Tok::AndOp, span, "/\\");
        } else {
          close_span(span);
          errors.push_back({span, "unexpected character '/'", {}});
        }
        break;
      case '\\':
        if (c.peek() == '/') {
          c.take();
          push(Tok::OrOp, span, "\\/");
        } else {
          close_span(span);
          errors.push_back({span, "unexpected character '\\'", {}});
        }
        break;
      default: {
        close_span(span);
        errors.push_back(
            {span, std::string("unexpected character '") + ch + "'", {}});
        break;
      }
    }
  }

  SourceSpan eof_span;
  eof_span.file = filename;
  eof_span.start_line = eof_span.end_line = c.line;
  eof_span.start_col = eof_span.end_col = c.col;
  Token eof;
  eof.kind = Tok::Eof;
  eof.span = std::move(eof_span);
  tokens.push_back(std::move(eof));
  return tokens;
}

}  // namespace bi
