#include <gtest/gtest.h>

#include <nfsm/network.hpp>
#include <nfsm/nn.hpp>

using namespace nfsm;

namespace
{

LayerSpec layer( Eigen::MatrixXd w, Eigen::VectorXd b, Activation a, Eigen::VectorXd t = {} )
{
  return { std::move( w ), std::move( b ), a, std::move( t ) };
}

} // namespace

TEST( Activation, NamesRoundTrip )
{
  for ( auto a : { Activation::identity, Activation::relu, Activation::sigmoid, Activation::step, Activation::step_strict } )
    EXPECT_EQ( parse_activation( to_string( a ) ), a );
  EXPECT_FALSE( parse_activation( "tanh" ) );
}

TEST( Activation, StepBoundary )
{
  NetworkSpec ge{ { layer( Eigen::MatrixXd::Identity( 1, 1 ), Eigen::VectorXd::Zero( 1 ), Activation::step,
                           Eigen::VectorXd::Constant( 1, 0.5 ) ) },
                  1,
                  1,
                  {} };
  auto gt = ge;
  gt.layers[0].activation = Activation::step_strict;
  const Eigen::VectorXd at = Eigen::VectorXd::Constant( 1, 0.5 );
  EXPECT_EQ( forward( ge, at )[0], 1.0 );
  EXPECT_EQ( forward( gt, at )[0], 0.0 );
  EXPECT_EQ( forward( gt, Eigen::VectorXd::Constant( 1, 0.51 ) )[0], 1.0 );
  EXPECT_EQ( forward( ge, Eigen::VectorXd::Constant( 1, 0.49 ) )[0], 0.0 );
}

TEST( Activation, SigmoidIsStableAtExtremes )
{
  EXPECT_DOUBLE_EQ( sigmoid( 0.0 ), 0.5 );
  EXPECT_EQ( sigmoid( 1000.0 ), 1.0 );
  EXPECT_EQ( sigmoid( -1000.0 ), 0.0 );
  EXPECT_NEAR( sigmoid( 2.0 ) + sigmoid( -2.0 ), 1.0, 1e-15 );
}

TEST( NetworkSpec, ValidateCatchesShapeErrors )
{
  NetworkSpec net{ { layer( Eigen::MatrixXd::Ones( 3, 2 ), Eigen::VectorXd::Zero( 3 ), Activation::relu ),
                     layer( Eigen::MatrixXd::Ones( 1, 3 ), Eigen::VectorXd::Zero( 1 ), Activation::identity ) },
                   2,
                   1,
                   {} };
  EXPECT_NO_THROW( net.validate() );
  EXPECT_EQ( net.depth(), 2u );
  EXPECT_EQ( net.widths(), ( std::vector<std::size_t>{ 3, 1 } ) );
  EXPECT_EQ( net.parameter_count(), 3u * 2 + 3 + 3 + 1 );

  auto bad = net;
  bad.input_dim = 3;
  EXPECT_THROW( bad.validate(), std::domain_error );
  bad = net;
  bad.output_dim = 2;
  EXPECT_THROW( bad.validate(), std::domain_error );
  bad = net;
  bad.layers[1].bias = Eigen::VectorXd::Zero( 2 );
  EXPECT_THROW( bad.validate(), std::domain_error );
  bad = net;
  bad.layers[0].activation = Activation::step;
  EXPECT_THROW( bad.validate(), std::domain_error );
  bad = net;
  bad.layers[1].thresholds = Eigen::VectorXd::Zero( 1 );
  EXPECT_THROW( bad.validate(), std::domain_error );
  EXPECT_THROW( NetworkSpec{}.validate(), std::domain_error );
}

TEST( NetworkSpec, ForwardMatchesHandComputation )
{
  Eigen::MatrixXd w1( 2, 2 );
  w1 << 1, -1, 2, 1;
  Eigen::MatrixXd w2( 1, 2 );
  w2 << 1, 0.5;
  NetworkSpec net{ { layer( w1, ( Eigen::VectorXd( 2 ) << 0, -1 ).finished(), Activation::relu ),
                     layer( w2, Eigen::VectorXd::Constant( 1, 0.25 ), Activation::identity ) },
                   2,
                   1,
                   {} };
  // x = (1, 3): h = relu(1-3, 2+3-1) = (0, 4); y = 0 + 2 + 0.25.
  EXPECT_DOUBLE_EQ( forward( net, ( Eigen::VectorXd( 2 ) << 1, 3 ).finished() )[0], 2.25 );
  Eigen::MatrixXd batch( 2, 2 );
  batch << 1, 0, 3, 0;
  const auto out = forward_batch( net, batch );
  EXPECT_DOUBLE_EQ( out( 0, 0 ), 2.25 );
  EXPECT_DOUBLE_EQ( out( 0, 1 ), 0.25 );
  EXPECT_THROW( forward( net, Eigen::VectorXd::Zero( 3 ) ), std::domain_error );
}
