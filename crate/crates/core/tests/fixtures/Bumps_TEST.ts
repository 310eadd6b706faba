@problemName Bumps
@timeStamps false
@missing false
@univariate true
@equalLength true
@seriesLength 16
@classLabel true late early
@data
0,0,0,0,0,0,0,0,0,0,1,4,1,0,0,0:late
0,1,3,1,0,0,0,0,0,0,0,0,0,0,0,0:early
