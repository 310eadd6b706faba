@problemName Pair
@timeStamps false
@missing true
@univariate false
@dimensions 2
@equalLength true
@seriesLength 5
@classLabel true 1 2 3
@data
1,2,3,4,5:5,4,3,2,1:1
?,?,?,?,?:1,1,1,1,1:2
0.5,-0.5,0.25,1e2,-3:0,0,0,0,0:3
