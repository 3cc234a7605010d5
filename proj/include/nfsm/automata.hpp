#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfsm
{

using state_index = std::size_t;
using symbol_index = std::size_t;

/// A string over a dense alphabet `{0, ..., k-1}`.
using SymbolString = std::vector<symbol_index>;

/*! \brief Deterministic finite automaton with a total transition table.

  States are `0..n-1`, symbols are `0..k-1`. The table is stored row-major:
  `transition(q, a) == table[q * k + a]`. Instances are immutable once
  constructed and every constructor path validates totality and closure.
*/
class Dfa
{
public:
  Dfa( std::size_t state_count, std::size_t alphabet_size, std::vector<state_index> table,
       state_index start_state, std::vector<state_index> accepting )
      : state_count_( state_count ),
        alphabet_size_( alphabet_size ),
        table_( std::move( table ) ),
        start_( start_state ),
        accepting_mask_( state_count, false )
  {
    if ( state_count_ == 0 )
      throw std::domain_error( "dfa: state count must be positive" );
    if ( alphabet_size_ == 0 )
      throw std::domain_error( "dfa: alphabet size must be positive" );
    if ( table_.size() != state_count_ * alphabet_size_ )
      throw std::domain_error( "dfa: transition table is not total (expected " +
                               std::to_string( state_count_ * alphabet_size_ ) + " entries, got " +
                               std::to_string( table_.size() ) + ")" );
    for ( std::size_t i = 0; i < table_.size(); ++i )
    {
      if ( table_[i] >= state_count_ )
        throw std::domain_error( "dfa: transition (" + std::to_string( i / alphabet_size_ ) + ", " +
                                 std::to_string( i % alphabet_size_ ) + ") targets out-of-range state " +
                                 std::to_string( table_[i] ) );
    }
    if ( start_ >= state_count_ )
      throw std::domain_error( "dfa: start state out of range" );
    for ( auto q : accepting )
    {
      if ( q >= state_count_ )
        throw std::domain_error( "dfa: accepting state " + std::to_string( q ) + " out of range" );
      accepting_mask_[q] = true;
    }
  }

  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  state_index start_state() const noexcept { return start_; }
  const std::vector<state_index>& table() const noexcept { return table_; }

  bool is_accepting( state_index q ) const
  {
    check_state( q );
    return accepting_mask_[q];
  }

  /// Accepting states in increasing order.
  std::vector<state_index> accepting_states() const
  {
    std::vector<state_index> out;
    for ( state_index q = 0; q < state_count_; ++q )
      if ( accepting_mask_[q] )
        out.push_back( q );
    return out;
  }

  /// Unchecked transition lookup; callers guarantee the range.
  state_index transition( state_index q, symbol_index a ) const noexcept
  {
    return table_[q * alphabet_size_ + a];
  }

  void check_state( state_index q ) const
  {
    if ( q >= state_count_ )
      throw std::domain_error( "state " + std::to_string( q ) + " out of range (n = " +
                               std::to_string( state_count_ ) + ")" );
  }

  void check_symbol( symbol_index a ) const
  {
    if ( a >= alphabet_size_ )
      throw std::domain_error( "symbol " + std::to_string( a ) + " out of range (k = " +
                               std::to_string( alphabet_size_ ) + ")" );
  }

  friend bool operator==( const Dfa&, const Dfa& ) = default;

private:
  std::size_t state_count_;
  std::size_t alphabet_size_;
  std::vector<state_index> table_;
  state_index start_;
  std::vector<bool> accepting_mask_;
};

inline state_index step( const Dfa& dfa, state_index state, symbol_index symbol )
{
  dfa.check_state( state );
  dfa.check_symbol( symbol );
  return dfa.transition( state, symbol );
}

/// Extended transition function starting from an arbitrary state.
inline state_index run_from( const Dfa& dfa, state_index state, const SymbolString& x )
{
  dfa.check_state( state );
  for ( auto a : x )
  {
    dfa.check_symbol( a );
    state = dfa.transition( state, a );
  }
  return state;
}

inline state_index run( const Dfa& dfa, const SymbolString& x )
{
  return run_from( dfa, dfa.start_state(), x );
}

inline bool accepts( const Dfa& dfa, const SymbolString& x )
{
  return dfa.is_accepting( run( dfa, x ) );
}

/// States reachable from the start state, in breadth-first order (symbols visited in index order).
inline std::vector<state_index> reachable_states( const Dfa& dfa )
{
  std::vector<bool> seen( dfa.state_count(), false );
  std::vector<state_index> order{ dfa.start_state() };
  seen[dfa.start_state()] = true;
  for ( std::size_t head = 0; head < order.size(); ++head )
  {
    for ( symbol_index a = 0; a < dfa.alphabet_size(); ++a )
    {
      auto r = dfa.transition( order[head], a );
      if ( !seen[r] )
      {
        seen[r] = true;
        order.push_back( r );
      }
    }
  }
  return order;
}

namespace detail
{

/* Hopcroft partition refinement over the reachable states. Returns the block
   id of every reachable state (unreachable states map to SIZE_MAX). */
inline std::vector<std::size_t> hopcroft_blocks( const Dfa& dfa, const std::vector<state_index>& reachable )
{
  const auto n = dfa.state_count();
  const auto k = dfa.alphabet_size();
  constexpr auto none = static_cast<std::size_t>( -1 );

  std::vector<bool> live( n, false );
  for ( auto q : reachable )
    live[q] = true;

  // inverse[a][r] = reachable predecessors p with delta(p, a) = r
  std::vector<std::vector<std::vector<state_index>>> inverse( k, std::vector<std::vector<state_index>>( n ) );
  for ( auto p : reachable )
    for ( symbol_index a = 0; a < k; ++a )
      inverse[a][dfa.transition( p, a )].push_back( p );

  std::vector<std::vector<state_index>> blocks;
  std::vector<std::size_t> block_of( n, none );
  {
    std::vector<state_index> acc, rej;
    for ( auto q : reachable )
      ( dfa.is_accepting( q ) ? acc : rej ).push_back( q );
    for ( auto* b : { &acc, &rej } )
    {
      if ( b->empty() )
        continue;
      for ( auto q : *b )
        block_of[q] = blocks.size();
      blocks.push_back( std::move( *b ) );
    }
  }

  std::vector<bool> in_work( blocks.size(), false );
  std::deque<std::size_t> work;
  if ( blocks.size() == 2 )
  {
    auto smaller = blocks[0].size() <= blocks[1].size() ? 0u : 1u;
    work.push_back( smaller );
    in_work[smaller] = true;
  }

  std::vector<std::size_t> hits( n, 0 );
  std::vector<bool> marked( n, false );
  while ( !work.empty() )
  {
    const auto splitter_id = work.front();
    work.pop_front();
    in_work[splitter_id] = false;
    const auto splitter = blocks[splitter_id]; // snapshot; the block may split below

    for ( symbol_index a = 0; a < k; ++a )
    {
      std::vector<state_index> preimage;
      for ( auto r : splitter )
        for ( auto p : inverse[a][r] )
          preimage.push_back( p );
      if ( preimage.empty() )
        continue;

      std::vector<std::size_t> touched;
      for ( auto p : preimage )
      {
        marked[p] = true;
        auto b = block_of[p];
        if ( hits[b]++ == 0 )
          touched.push_back( b );
      }

      for ( auto b : touched )
      {
        if ( hits[b] < blocks[b].size() )
        {
          std::vector<state_index> inside, outside;
          for ( auto q : blocks[b] )
            ( marked[q] ? inside : outside ).push_back( q );
          const auto fresh = blocks.size();
          blocks[b] = std::move( inside );
          for ( auto q : outside )
            block_of[q] = fresh;
          blocks.push_back( std::move( outside ) );
          in_work.push_back( false );
          if ( in_work[b] )
          {
            work.push_back( fresh );
            in_work[fresh] = true;
          }
          else
          {
            auto smaller = blocks[b].size() <= blocks[fresh].size() ? b : fresh;
            work.push_back( smaller );
            in_work[smaller] = true;
          }
        }
        hits[b] = 0;
      }
      for ( auto p : preimage )
        marked[p] = false;
      for ( auto b : touched )
        hits[b] = 0;
    }
  }

  for ( state_index q = 0; q < n; ++q )
    if ( !live[q] )
      block_of[q] = none;
  return block_of;
}

} // namespace detail

/*! \brief Minimal DFA for the same language.

  Drops unreachable states, merges indistinguishable ones by Hopcroft
  partition refinement and renumbers the result in breadth-first order from
  the start state, so the output is canonical for a given language.
*/
inline Dfa minimize( const Dfa& dfa )
{
  const auto reachable = reachable_states( dfa );
  const auto block_of = detail::hopcroft_blocks( dfa, reachable );
  const auto k = dfa.alphabet_size();
  constexpr auto none = static_cast<std::size_t>( -1 );

  // BFS over blocks from the start block fixes the new numbering.
  std::map<std::size_t, state_index> number_of;
  std::vector<state_index> representative;
  number_of[block_of[dfa.start_state()]] = 0;
  representative.push_back( dfa.start_state() );
  for ( std::size_t head = 0; head < representative.size(); ++head )
  {
    for ( symbol_index a = 0; a < k; ++a )
    {
      auto b = block_of[dfa.transition( representative[head], a )];
      if ( !number_of.contains( b ) )
      {
        number_of[b] = representative.size();
        representative.push_back( dfa.transition( representative[head], a ) );
      }
    }
  }

  const auto m = representative.size();
  std::vector<state_index> table( m * k );
  std::vector<state_index> accepting;
  for ( state_index i = 0; i < m; ++i )
  {
    for ( symbol_index a = 0; a < k; ++a )
    {
      auto b = block_of[dfa.transition( representative[i], a )];
      if ( b == none )
        throw std::logic_error( "minimize: reachable state mapped to no block" );
      table[i * k + a] = number_of.at( b );
    }
    if ( dfa.is_accepting( representative[i] ) )
      accepting.push_back( i );
  }
  return Dfa( m, k, std::move( table ), 0, std::move( accepting ) );
}

/// Myhill-Nerode classes of a sample of strings.
struct NerodePartition
{
  /// class_of[i] is the minimal-DFA state reached by the i-th input string.
  std::vector<std::size_t> class_of;
  /// Number of distinct classes among the sampled strings.
  std::size_t class_count = 0;

  /// Indices of the input strings grouped by class, classes in increasing id order.
  std::vector<std::vector<std::size_t>> groups() const
  {
    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for ( std::size_t i = 0; i < class_of.size(); ++i )
      by_class[class_of[i]].push_back( i );
    std::vector<std::vector<std::size_t>> out;
    for ( auto& [_, members] : by_class )
      out.push_back( std::move( members ) );
    return out;
  }
};

inline NerodePartition nerode_classes( const Dfa& dfa, const std::vector<SymbolString>& strings )
{
  const auto minimal = minimize( dfa );
  NerodePartition partition;
  std::vector<bool> seen( minimal.state_count(), false );
  partition.class_of.reserve( strings.size() );
  for ( const auto& x : strings )
  {
    auto c = run( minimal, x );
    partition.class_of.push_back( c );
    if ( !seen[c] )
    {
      seen[c] = true;
      ++partition.class_count;
    }
  }
  return partition;
}

/// Even-parity DFA over {0, 1}: q0 = even number of ones (accepting), q1 = odd.
inline Dfa make_parity_dfa()
{
  return Dfa( 2, 2, { 0, 1, 1, 0 }, 0, { 0 } );
}

/// Counts ones modulo n over {0, 1}; '0' self-loops, accepting {q0}.
inline Dfa make_mod_counter_dfa( std::size_t n )
{
  if ( n == 0 )
    throw std::domain_error( "mod counter needs at least one state" );
  std::vector<state_index> table( n * 2 );
  for ( state_index q = 0; q < n; ++q )
  {
    table[q * 2 + 0] = q;
    table[q * 2 + 1] = ( q + 1 ) % n;
  }
  return Dfa( n, 2, std::move( table ), 0, { 0 } );
}

/// Uniformly random total DFA; each state accepts with probability 1/2.
inline Dfa make_random_dfa( std::size_t n, std::size_t k, std::uint64_t seed )
{
  if ( n == 0 || k == 0 )
    throw std::domain_error( "random dfa needs n >= 1 and k >= 1" );
  std::mt19937_64 rng( seed );
  std::uniform_int_distribution<state_index> pick( 0, n - 1 );
  std::vector<state_index> table( n * k );
  for ( auto& t : table )
    t = pick( rng );
  std::vector<state_index> accepting;
  for ( state_index q = 0; q < n; ++q )
    if ( rng() & 1u )
      accepting.push_back( q );
  return Dfa( n, k, std::move( table ), 0, std::move( accepting ) );
}

/// Stable FNV-1a fingerprint of the automaton structure.
inline std::uint64_t dfa_hash( const Dfa& dfa )
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h]( std::uint64_t v ) {
    for ( int byte = 0; byte < 8; ++byte )
    {
      h ^= ( v >> ( 8 * byte ) ) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  mix( dfa.state_count() );
  mix( dfa.alphabet_size() );
  mix( dfa.start_state() );
  for ( auto t : dfa.table() )
    mix( t );
  for ( auto q : dfa.accepting_states() )
    mix( q );
  return h;
}

/// Calls `visit(x)` for every string of length `length` over `k` symbols, in lexicographic order.
template<typename Visitor>
void for_each_string( std::size_t k, std::size_t length, Visitor&& visit )
{
  SymbolString x( length, 0 );
  while ( true )
  {
    visit( static_cast<const SymbolString&>( x ) );
    std::size_t pos = length;
    while ( pos > 0 )
    {
      --pos;
      if ( ++x[pos] < k )
        break;
      x[pos] = 0;
      if ( pos == 0 )
        return;
    }
    if ( length == 0 )
      return;
  }
}

/// The i-th string of length `length` in lexicographic order.
inline SymbolString string_at( std::size_t k, std::size_t length, std::uint64_t index )
{
  SymbolString x( length, 0 );
  for ( std::size_t pos = length; pos > 0; --pos )
  {
    x[pos - 1] = static_cast<symbol_index>( index % k );
    index /= k;
  }
  return x;
}

} // namespace nfsm
