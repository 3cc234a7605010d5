#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "automata.hpp"
#include "experiments.hpp"
#include "network.hpp"

namespace nfsm::io
{

/// Malformed document; `line` and `column` are 1-based.
class parse_error : public std::runtime_error
{
public:
  parse_error( std::size_t line, std::size_t column, const std::string& what )
      : std::runtime_error( std::to_string( line ) + ":" + std::to_string( column ) + ": " + what ),
        line( line ),
        column( column )
  {
  }

  std::size_t line;
  std::size_t column;
};

namespace detail
{

struct Token
{
  std::string_view text;
  std::size_t column;
};

struct Line
{
  std::size_t number;
  std::vector<Token> tokens;
};

/// Splits into whitespace-separated tokens; `#` starts a comment; blank lines are dropped.
inline std::vector<Line> tokenize( std::string_view text )
{
  std::vector<Line> lines;
  std::size_t number = 0;
  while ( !text.empty() || number == 0 )
  {
    ++number;
    const auto eol = text.find( '\n' );
    auto raw = text.substr( 0, eol );
    text = eol == std::string_view::npos ? std::string_view{} : text.substr( eol + 1 );
    if ( auto hash = raw.find( '#' ); hash != std::string_view::npos )
      raw = raw.substr( 0, hash );
    Line line{ number, {} };
    std::size_t i = 0;
    while ( i < raw.size() )
    {
      while ( i < raw.size() && std::isspace( static_cast<unsigned char>( raw[i] ) ) )
        ++i;
      const auto begin = i;
      while ( i < raw.size() && !std::isspace( static_cast<unsigned char>( raw[i] ) ) )
        ++i;
      if ( i > begin )
        line.tokens.push_back( { raw.substr( begin, i - begin ), begin + 1 } );
    }
    if ( !line.tokens.empty() )
      lines.push_back( std::move( line ) );
    if ( eol == std::string_view::npos )
      break;
  }
  return lines;
}

template<typename T>
T parse_number( const Line& line, const Token& tok )
{
  T value{};
  const auto* end = tok.text.data() + tok.text.size();
  auto [ptr, ec] = std::from_chars( tok.text.data(), end, value );
  if ( ec != std::errc{} || ptr != end )
    throw parse_error( line.number, tok.column, "expected a number, found '" + std::string( tok.text ) + "'" );
  return value;
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double( double v )
{
  char buf[64];
  auto [ptr, ec] = std::to_chars( buf, buf + sizeof buf, v );
  if ( ec != std::errc{} )
    throw std::runtime_error( "cannot format double" );
  return { buf, ptr };
}

inline void expect_arity( const Line& line, std::size_t min_args, std::size_t max_args )
{
  const auto args = line.tokens.size() - 1;
  if ( args < min_args )
  {
    const auto& last = line.tokens.back();
    throw parse_error( line.number, last.column + last.text.size(),
                       "'" + std::string( line.tokens[0].text ) + "' expects " + std::to_string( min_args ) +
                           " argument(s)" );
  }
  if ( args > max_args )
    throw parse_error( line.number, line.tokens[max_args + 1].column,
                       "unexpected token '" + std::string( line.tokens[max_args + 1].text ) + "'" );
}

} // namespace detail

// ---------------------------------------------------------------------------
// DFA documents

/*! \brief Text form of a DFA with named states and symbols.

  \verbatim
  dfa 1
  states even odd
  symbols 0 1
  start even
  accept even
  transitions
  even 0 -> even
  even 1 -> odd
  odd 0 -> odd
  odd 1 -> even
  \endverbatim

  Names are looked up in declaration order, so the i-th name in `states`
  is state i of the resulting Dfa.
*/
struct DfaDocument
{
  std::vector<std::string> state_names;
  std::vector<std::string> symbol_names;
  std::size_t start = 0;
  std::vector<state_index> accepting;
  /// Row-major, state_names.size() x symbol_names.size().
  std::vector<state_index> table;

  Dfa to_dfa() const
  {
    return Dfa( state_names.size(), symbol_names.size(), table, start, accepting );
  }

  /// Names states q0, q1, ... and symbols 0, 1, ...
  static DfaDocument from_dfa( const Dfa& dfa )
  {
    DfaDocument doc;
    for ( state_index q = 0; q < dfa.state_count(); ++q )
      doc.state_names.push_back( "q" + std::to_string( q ) );
    for ( symbol_index a = 0; a < dfa.alphabet_size(); ++a )
      doc.symbol_names.push_back( std::to_string( a ) );
    doc.start = dfa.start_state();
    doc.accepting = dfa.accepting_states();
    doc.table = dfa.table();
    return doc;
  }

  friend bool operator==( const DfaDocument&, const DfaDocument& ) = default;
};

inline DfaDocument parse_dfa( std::string_view text )
{
  using detail::Line;
  using detail::Token;
  const auto lines = detail::tokenize( text );
  if ( lines.empty() )
    throw parse_error( 1, 1, "empty document, expected 'dfa 1'" );

  const auto& header = lines.front();
  if ( header.tokens[0].text != "dfa" )
    throw parse_error( header.number, header.tokens[0].column, "expected 'dfa 1' header" );
  detail::expect_arity( header, 1, 1 );
  if ( header.tokens[1].text != "1" )
    throw parse_error( header.number, header.tokens[1].column,
                       "unsupported dfa format version '" + std::string( header.tokens[1].text ) + "'" );

  DfaDocument doc;
  std::map<std::string, std::size_t, std::less<>> state_ids, symbol_ids;
  std::optional<std::size_t> start;
  bool have_accept = false;
  const Line* transitions_at = nullptr;
  std::vector<std::optional<state_index>> table;

  auto lookup = [&]( const auto& ids, const Line& line, const Token& tok, const char* kind ) {
    auto it = ids.find( tok.text );
    if ( it == ids.end() )
      throw parse_error( line.number, tok.column, std::string( "unknown " ) + kind + " '" + std::string( tok.text ) + "'" );
    return it->second;
  };
  auto declare = [&]( const Line& line, auto& ids, std::vector<std::string>& names, const char* kind ) {
    if ( !names.empty() )
      throw parse_error( line.number, line.tokens[0].column, std::string( kind ) + " declared twice" );
    detail::expect_arity( line, 1, line.tokens.size() );
    for ( std::size_t i = 1; i < line.tokens.size(); ++i )
    {
      const auto& tok = line.tokens[i];
      if ( tok.text == "->" )
        throw parse_error( line.number, tok.column, "'->' is not a valid name" );
      if ( !ids.emplace( std::string( tok.text ), names.size() ).second )
        throw parse_error( line.number, tok.column, std::string( "duplicate " ) + kind + " '" + std::string( tok.text ) + "'" );
      names.emplace_back( tok.text );
    }
  };
  auto need_alphabet = [&]( const Line& line ) {
    if ( doc.state_names.empty() || doc.symbol_names.empty() )
      throw parse_error( line.number, line.tokens[0].column, "'states' and 'symbols' must come first" );
  };

  for ( std::size_t li = 1; li < lines.size(); ++li )
  {
    const auto& line = lines[li];
    const auto& head = line.tokens[0];
    if ( transitions_at )
    {
      if ( line.tokens.size() != 4 || line.tokens[2].text != "->" )
        throw parse_error( line.number, head.column, "expected '<state> <symbol> -> <state>'" );
      const auto from = lookup( state_ids, line, line.tokens[0], "state" );
      const auto sym = lookup( symbol_ids, line, line.tokens[1], "symbol" );
      const auto to = lookup( state_ids, line, line.tokens[3], "state" );
      auto& slot = table[from * doc.symbol_names.size() + sym];
      if ( slot )
        throw parse_error( line.number, head.column,
                           "duplicate transition for (" + doc.state_names[from] + ", " + doc.symbol_names[sym] + ")" );
      slot = to;
    }
    else if ( head.text == "states" )
      declare( line, state_ids, doc.state_names, "states" );
    else if ( head.text == "symbols" )
      declare( line, symbol_ids, doc.symbol_names, "symbols" );
    else if ( head.text == "start" )
    {
      need_alphabet( line );
      if ( start )
        throw parse_error( line.number, head.column, "start declared twice" );
      detail::expect_arity( line, 1, 1 );
      start = lookup( state_ids, line, line.tokens[1], "state" );
    }
    else if ( head.text == "accept" )
    {
      need_alphabet( line );
      if ( have_accept )
        throw parse_error( line.number, head.column, "accept declared twice" );
      have_accept = true;
      for ( std::size_t i = 1; i < line.tokens.size(); ++i )
      {
        const auto q = lookup( state_ids, line, line.tokens[i], "state" );
        if ( std::find( doc.accepting.begin(), doc.accepting.end(), q ) != doc.accepting.end() )
          throw parse_error( line.number, line.tokens[i].column, "state listed twice in accept" );
        doc.accepting.push_back( q );
      }
    }
    else if ( head.text == "transitions" )
    {
      need_alphabet( line );
      detail::expect_arity( line, 0, 0 );
      transitions_at = &line;
      table.assign( doc.state_names.size() * doc.symbol_names.size(), std::nullopt );
    }
    else
      throw parse_error( line.number, head.column, "unknown directive '" + std::string( head.text ) + "'" );
  }

  const auto& last = lines.back();
  if ( !start )
    throw parse_error( last.number + 1, 1, "missing 'start'" );
  if ( !transitions_at )
    throw parse_error( last.number + 1, 1, "missing 'transitions'" );
  const auto k = doc.symbol_names.size();
  for ( std::size_t i = 0; i < table.size(); ++i )
  {
    if ( !table[i] )
      throw parse_error( transitions_at->number, transitions_at->tokens[0].column,
                         "missing transition for (" + doc.state_names[i / k] + ", " + doc.symbol_names[i % k] + ")" );
    doc.table.push_back( *table[i] );
  }
  doc.start = *start;
  std::sort( doc.accepting.begin(), doc.accepting.end() );
  return doc;
}

inline std::string write_dfa( const DfaDocument& doc )
{
  std::ostringstream os;
  auto names = [&]( const std::vector<std::string>& v ) {
    for ( const auto& s : v )
      os << ' ' << s;
    os << '\n';
  };
  os << "dfa 1\nstates";
  names( doc.state_names );
  os << "symbols";
  names( doc.symbol_names );
  os << "start " << doc.state_names.at( doc.start ) << "\naccept";
  for ( auto q : doc.accepting )
    os << ' ' << doc.state_names.at( q );
  os << "\ntransitions\n";
  const auto k = doc.symbol_names.size();
  for ( std::size_t i = 0; i < doc.table.size(); ++i )
    os << doc.state_names[i / k] << ' ' << doc.symbol_names[i % k] << " -> " << doc.state_names.at( doc.table[i] )
       << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Network documents

/*! \brief Versioned text form of a NetworkSpec.

  \verbatim
  nfsm-network 1
  construction transition_layer
  dfa_hash 1234
  input_dim 4
  output_dim 2
  layer relu 4 4        # activation, outputs, inputs
  w 1 0 1 0             # one line per output row
  ...
  b -1 -1 -1 -1
  t 0.5 ...             # thresholds, step layers only
  \endverbatim

  Numbers are written in shortest round-trip form, so loading a saved
  network reproduces every weight bit for bit.
*/
inline std::string write_network( const NetworkSpec& net )
{
  net.validate();
  std::ostringstream os;
  os << "nfsm-network 1\n";
  os << "construction " << ( net.metadata.construction.empty() ? "-" : net.metadata.construction ) << '\n';
  os << "dfa_hash " << net.metadata.dfa_hash << '\n';
  if ( net.metadata.length )
    os << "length " << *net.metadata.length << '\n';
  if ( net.metadata.seed )
    os << "seed " << *net.metadata.seed << '\n';
  os << "input_dim " << net.input_dim << "\noutput_dim " << net.output_dim << '\n';
  auto row = [&]( char tag, const auto& values ) {
    os << tag;
    for ( Eigen::Index i = 0; i < values.size(); ++i )
      os << ' ' << detail::format_double( values[i] );
    os << '\n';
  };
  for ( const auto& l : net.layers )
  {
    os << "layer " << to_string( l.activation ) << ' ' << l.output_dim() << ' ' << l.input_dim() << '\n';
    for ( Eigen::Index r = 0; r < l.weights.rows(); ++r )
      row( 'w', Eigen::VectorXd( l.weights.row( r ).transpose() ) );
    row( 'b', l.bias );
    if ( is_step( l.activation ) )
      row( 't', l.thresholds );
  }
  return os.str();
}

inline NetworkSpec parse_network( std::string_view text )
{
  using detail::Line;
  const auto lines = detail::tokenize( text );
  if ( lines.empty() )
    throw parse_error( 1, 1, "empty document, expected 'nfsm-network 1'" );
  const auto& header = lines.front();
  if ( header.tokens[0].text != "nfsm-network" )
    throw parse_error( header.number, header.tokens[0].column, "expected 'nfsm-network 1' header" );
  detail::expect_arity( header, 1, 1 );
  if ( header.tokens[1].text != "1" )
    throw parse_error( header.number, header.tokens[1].column,
                       "unsupported network format version '" + std::string( header.tokens[1].text ) + "'" );

  NetworkSpec net;
  std::optional<std::size_t> input_dim, output_dim;
  std::size_t li = 1;

  auto values = [&]( const Line& line, std::size_t expected ) {
    if ( line.tokens.size() - 1 != expected )
      throw parse_error( line.number, line.tokens[0].column,
                         "expected " + std::to_string( expected ) + " values, found " +
                             std::to_string( line.tokens.size() - 1 ) );
    Eigen::VectorXd v( static_cast<Eigen::Index>( expected ) );
    for ( std::size_t i = 0; i < expected; ++i )
      v[static_cast<Eigen::Index>( i )] = detail::parse_number<double>( line, line.tokens[i + 1] );
    return v;
  };
  auto expect_tag = [&]( std::string_view tag, const Line& context ) -> const Line& {
    if ( li >= lines.size() )
      throw parse_error( context.number + 1, 1, "unexpected end of document, expected '" + std::string( tag ) + "'" );
    const auto& line = lines[li++];
    if ( line.tokens[0].text != tag )
      throw parse_error( line.number, line.tokens[0].column,
                         "expected '" + std::string( tag ) + "', found '" + std::string( line.tokens[0].text ) + "'" );
    return line;
  };

  for ( ; li < lines.size() && lines[li].tokens[0].text != "layer"; ++li )
  {
    const auto& line = lines[li];
    const auto key = line.tokens[0].text;
    detail::expect_arity( line, 1, 1 );
    const auto& arg = line.tokens[1];
    if ( key == "construction" )
      net.metadata.construction = arg.text == "-" ? "" : std::string( arg.text );
    else if ( key == "dfa_hash" )
      net.metadata.dfa_hash = detail::parse_number<std::uint64_t>( line, arg );
    else if ( key == "length" )
      net.metadata.length = detail::parse_number<std::size_t>( line, arg );
    else if ( key == "seed" )
      net.metadata.seed = detail::parse_number<std::uint64_t>( line, arg );
    else if ( key == "input_dim" )
      input_dim = detail::parse_number<std::size_t>( line, arg );
    else if ( key == "output_dim" )
      output_dim = detail::parse_number<std::size_t>( line, arg );
    else
      throw parse_error( line.number, line.tokens[0].column, "unknown field '" + std::string( key ) + "'" );
  }
  if ( !input_dim || !output_dim )
    throw parse_error( li < lines.size() ? lines[li].number : lines.back().number + 1, 1,
                       "missing input_dim or output_dim before the first layer" );
  net.input_dim = *input_dim;
  net.output_dim = *output_dim;

  while ( li < lines.size() )
  {
    const auto& head = lines[li++];
    if ( head.tokens[0].text != "layer" )
      throw parse_error( head.number, head.tokens[0].column, "expected 'layer'" );
    detail::expect_arity( head, 3, 3 );
    LayerSpec layer;
    const auto act = parse_activation( head.tokens[1].text );
    if ( !act )
      throw parse_error( head.number, head.tokens[1].column,
                         "unknown activation '" + std::string( head.tokens[1].text ) + "'" );
    layer.activation = *act;
    const auto out = detail::parse_number<std::size_t>( head, head.tokens[2] );
    const auto in = detail::parse_number<std::size_t>( head, head.tokens[3] );
    layer.weights.resize( static_cast<Eigen::Index>( out ), static_cast<Eigen::Index>( in ) );
    for ( std::size_t r = 0; r < out; ++r )
      layer.weights.row( static_cast<Eigen::Index>( r ) ) = values( expect_tag( "w", head ), in ).transpose();
    layer.bias = values( expect_tag( "b", head ), out );
    if ( is_step( layer.activation ) )
      layer.thresholds = values( expect_tag( "t", head ), out );
    net.layers.push_back( std::move( layer ) );
  }
  try
  {
    net.validate();
  }
  catch ( const std::domain_error& e )
  {
    throw parse_error( lines.back().number, 1, e.what() );
  }
  return net;
}

// ---------------------------------------------------------------------------
// Graph export

inline std::string dot_quote( std::string_view s )
{
  std::string out = "\"";
  for ( char c : s )
  {
    if ( c == '"' || c == '\\' )
      out += '\\';
    out += c;
  }
  return out + '"';
}

/// Graphviz digraph: one node per state (accepting states double-circled, start bold), one edge per transition.
inline std::string export_dot( const DfaDocument& doc )
{
  std::ostringstream os;
  os << "digraph dfa {\n  rankdir=LR;\n";
  for ( std::size_t q = 0; q < doc.state_names.size(); ++q )
  {
    const bool accept = std::find( doc.accepting.begin(), doc.accepting.end(), q ) != doc.accepting.end();
    os << "  " << dot_quote( doc.state_names[q] ) << " [shape=" << ( accept ? "doublecircle" : "circle" )
       << ( q == doc.start ? ", style=bold" : "" ) << "];\n";
  }
  const auto k = doc.symbol_names.size();
  for ( std::size_t i = 0; i < doc.table.size(); ++i )
    os << "  " << dot_quote( doc.state_names[i / k] ) << " -> " << dot_quote( doc.state_names[doc.table[i]] )
       << " [label=" << dot_quote( doc.symbol_names[i % k] ) << "];\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Experiment output

inline std::string csv_field( std::string_view s )
{
  if ( s.find_first_of( ",\"\n" ) == std::string_view::npos )
    return std::string( s );
  std::string out = "\"";
  for ( char c : s )
  {
    if ( c == '"' )
      out += '"';
    out += c;
  }
  return out + '"';
}

/// Columns config, seed, metric, value; rows in the report's config-then-seed order.
inline std::string write_csv( const experiments::ExperimentReport& report )
{
  std::ostringstream os;
  os << "config,seed,metric,value\n";
  for ( const auto& v : report.values )
    os << csv_field( v.config ) << ',' << v.seed << ',' << csv_field( v.metric ) << ','
       << detail::format_double( v.value ) << '\n';
  return os.str();
}

inline std::string fixed( double v, int digits = 4 )
{
  char buf[64];
  std::snprintf( buf, sizeof buf, "%.*f", digits, v );
  return buf;
}

/// One row per configuration: mean, std and 95% CI of `metric` over seeds.
inline std::string render_table( const experiments::ExperimentReport& report, const std::string& metric )
{
  std::size_t width = 6;
  for ( const auto& c : report.configs )
    width = std::max( width, c.size() );
  std::ostringstream os;
  auto pad = [&]( const std::string& s ) { return s + std::string( width - s.size(), ' ' ); };
  os << pad( "config" ) << "  seeds  mean    std     ci95     (" << metric << ")\n";
  for ( const auto& c : report.configs )
  {
    const auto values = report.metric_values( c, metric );
    os << pad( c ) << "  " << values.size();
    if ( values.size() >= 2 )
    {
      const auto s = experiments::summarize( values );
      os << "      " << fixed( s.mean ) << "  " << fixed( s.std ) << "  +-" << fixed( s.ci95 );
    }
    else if ( values.size() == 1 )
      os << "      " << fixed( values[0] );
    os << '\n';
  }
  return os.str();
}

} // namespace nfsm::io
