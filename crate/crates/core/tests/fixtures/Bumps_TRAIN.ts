# Small two-class univariate set: a bump early or late in the series.
@problemName Bumps
@timeStamps false
@missing true
@univariate true
@equalLength true
@seriesLength 16
@classLabel true early late
@data
0,1,4,1,0,0,0,0,0,0,0,0,0,0,0,0:early
0,0,1,5,1,0,0,0,0,0,0,0,0,0,0,0.5:early
0,0,0,0,0,0,0,0,0,0,0,1,4,1,0,0:late
0.2,0,0,0,0,0,0,0,0,0,0,0,1,5,?,0:late
